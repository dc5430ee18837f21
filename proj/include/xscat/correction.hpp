#pragma once
#include <filesystem>
#include <vector>

#include "xscat/postprocess.hpp"
#include "xscat/recon.hpp"
#include "xscat/transport.hpp"

namespace xscat {

struct CorrectionConfig {
    int n_iterations = 3;
    int simulate_every_kth_angle = 2; // 2 = half-set scheme
    int mc_nu = 0, mc_nv = 0;         // simulation detector grid (0 = full resolution)
    std::array<int, 3> recon_dims{64, 64, 64};
    int n_classes = 3;
    std::vector<ClassSpec> class_map; // per segmentation class, ascending attenuation
    SimConfig sim;
    SgFilterSpec sg{15, 3};
    bool sg_auto_window = true; // scale the window to the MC grid
    int workers = 1;
};

void validate_correction_config(const CorrectionConfig& cfg, int n_materials);

struct IterationReport {
    int iteration = 0;
    double seconds_fbp = 0.0;
    double seconds_segmentation = 0.0;
    double seconds_mc_scatter = 0.0;
    double seconds_mc_primary = 0.0;
    double seconds_postprocess = 0.0;
    double seconds_correction = 0.0;
    double seconds_total = 0.0;
    double mc_seconds_per_projection = 0.0;
    double mean_scatter_fraction = 0.0; // mean Is / (Ip + Is)
    double ncc_to_previous = 0.0;       // corrected volume vs previous iteration's
    std::size_t negative_scatter_clamped = 0;
};

// key=value lines, one block per iteration.
void write_reports(const std::vector<IterationReport>& reports,
                   const std::filesystem::path& path);
// Summary CSV: photons, splitting, step size, MC time/projection,
// MC time/iteration, correction time/iteration.
void write_summary_csv(const std::vector<IterationReport>& reports, const SimConfig& sim,
                       const std::filesystem::path& path);

// Log-domain scatter correction c = a - ln(Ip / (Ip + Is)) elementwise.
// Negative scatter values (smoothing undershoot) are clamped to zero and
// counted; non-positive primaries throw.
ProjectionStack correct_projections(const ProjectionStack& a, const ProjectionStack& primary,
                                    const ProjectionStack& scatter,
                                    std::size_t* clamped_count = nullptr);

struct CorrectionResult {
    Volume corrected_volume;
    ProjectionStack corrected_stack;
    std::vector<IterationReport> reports;
};

// The full iterative loop: ln-conversion (once), then per iteration
// FBP -> Otsu segmentation -> density phantom -> MC scatter (every k-th
// angle, low res) + MC primary (all angles) -> smoothing -> angle
// interpolation -> up-sampling -> log-domain correction of the *original*
// attenuation stack. Each corrected stack is reconstructed to drive the next
// segmentation and the convergence report.
CorrectionResult run_iterative_correction(const ProjectionStack& raw_intensity,
                                          const DetectorImage& flatfield, const ScanGeometry& g,
                                          const Spectrum& spec, const DetectorResponse& resp,
                                          const CorrectionConfig& cfg,
                                          const std::vector<Material>& materials);

} // namespace xscat
