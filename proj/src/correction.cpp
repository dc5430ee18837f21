#include "xscat/correction.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "xscat/metrics.hpp"

namespace xscat {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
auto stage(int iteration, const char* name, F&& f)
{
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error("iteration " + std::to_string(iteration) + ", stage " + name +
                                 ": " + e.what());
    }
}

} // namespace

void validate_correction_config(const CorrectionConfig& cfg, int n_materials)
{
    if (cfg.n_iterations < 1)
        throw std::runtime_error("correction config: n_iterations must be >= 1");
    if (cfg.simulate_every_kth_angle < 1)
        throw std::runtime_error("correction config: simulate_every_kth_angle must be >= 1");
    if (cfg.n_classes < 2 || cfg.n_classes > 4)
        throw std::runtime_error("correction config: n_classes must be in [2,4]");
    if (static_cast<int>(cfg.class_map.size()) != cfg.n_classes)
        throw std::runtime_error("correction config: class_map must have n_classes entries");
    for (const auto& c : cfg.class_map) {
        if (c.material_id < 0 || c.material_id >= n_materials)
            throw std::runtime_error("correction config: class material id " +
                                     std::to_string(c.material_id) + " out of range");
        if (c.material_id == 0 && c.density != 0.0)
            throw std::runtime_error("correction config: vacuum class must have density 0");
        if (c.density < 0.0)
            throw std::runtime_error("correction config: negative class density");
    }
    for (int d : cfg.recon_dims)
        if (d <= 0)
            throw std::runtime_error("correction config: recon dims must be positive");
    validate_sim_config(cfg.sim);
}

ProjectionStack correct_projections(const ProjectionStack& a, const ProjectionStack& primary,
                                    const ProjectionStack& scatter, std::size_t* clamped_count)
{
    if (a.nu != primary.nu || a.nv != primary.nv || a.nu != scatter.nu || a.nv != scatter.nv ||
        a.n_angles() != primary.n_angles() || a.n_angles() != scatter.n_angles())
        throw std::runtime_error("correct_projections: stack dims mismatch");

    ProjectionStack c = make_stack(a.nu, a.nv, a.angle_values);
    std::size_t clamped = 0;
    for (int i = 0; i < a.n_angles(); ++i) {
        const auto& av = a.images[i].values;
        const auto& pv = primary.images[i].values;
        const auto& sv = scatter.images[i].values;
        auto& cv = c.images[i].values;
        for (std::size_t p = 0; p < av.size(); ++p) {
            if (!(pv[p] > 0.0))
                throw std::runtime_error("correct_projections: non-positive primary pixel");
            double is = sv[p];
            if (is < 0.0) {
                is = 0.0;
                ++clamped;
            }
            cv[p] = av[p] - std::log(pv[p] / (pv[p] + is));
        }
    }
    if (clamped_count)
        *clamped_count = clamped;
    return c;
}

void write_reports(const std::vector<IterationReport>& reports, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write report " + path.string());
    for (const auto& r : reports) {
        out << "iteration=" << r.iteration << "\n";
        out << "seconds_fbp=" << r.seconds_fbp << "\n";
        out << "seconds_segmentation=" << r.seconds_segmentation << "\n";
        out << "seconds_mc_scatter=" << r.seconds_mc_scatter << "\n";
        out << "seconds_mc_primary=" << r.seconds_mc_primary << "\n";
        out << "seconds_postprocess=" << r.seconds_postprocess << "\n";
        out << "seconds_correction=" << r.seconds_correction << "\n";
        out << "seconds_total=" << r.seconds_total << "\n";
        out << "mc_seconds_per_projection=" << r.mc_seconds_per_projection << "\n";
        out << "mean_scatter_fraction=" << r.mean_scatter_fraction << "\n";
        out << "ncc_to_previous=" << r.ncc_to_previous << "\n";
        out << "negative_scatter_clamped=" << r.negative_scatter_clamped << "\n";
        out << "\n";
    }
}

void write_summary_csv(const std::vector<IterationReport>& reports, const SimConfig& sim,
                       const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write summary " + path.string());
    out << "iteration,photons,splitting,step_size,mc_time_per_projection_s,"
           "mc_time_per_iteration_s,correction_time_per_iteration_s\n";
    for (const auto& r : reports) {
        out << r.iteration << "," << sim.photons_total << "," << sim.splitting << ","
            << sim.step_voxels << "," << r.mc_seconds_per_projection << ","
            << (r.seconds_mc_scatter + r.seconds_mc_primary) << "," << r.seconds_total << "\n";
    }
}

CorrectionResult run_iterative_correction(const ProjectionStack& raw_intensity,
                                          const DetectorImage& flatfield, const ScanGeometry& g,
                                          const Spectrum& spec, const DetectorResponse& resp,
                                          const CorrectionConfig& cfg,
                                          const std::vector<Material>& materials)
{
    validate_correction_config(cfg, static_cast<int>(materials.size()) + 1);
    validate_geometry(g);
    if (raw_intensity.n_angles() != g.n_angles())
        throw std::runtime_error("run_iterative_correction: stack angle count mismatch");

    const int mc_nu = cfg.mc_nu > 0 ? cfg.mc_nu : raw_intensity.nu;
    const int mc_nv = cfg.mc_nv > 0 ? cfg.mc_nv : raw_intensity.nv;
    // square pixels: the simulation grid must keep the detector aspect
    if (static_cast<long long>(mc_nv) * g.nu != static_cast<long long>(mc_nu) * g.nv)
        throw std::runtime_error("run_iterative_correction: mc grid must preserve the detector "
                                 "aspect ratio");
    ScanGeometry g_mc = g;
    g_mc.nu = mc_nu;
    g_mc.nv = mc_nv;
    g_mc.pixel_pitch = g.pixel_pitch * g.nu / mc_nu;

    SgFilterSpec sg = cfg.sg_auto_window ? default_sg_spec(mc_nu, mc_nv) : cfg.sg;
    sg.polyorder = cfg.sg.polyorder;
    validate_sg_spec(sg);

    std::vector<int> scatter_subset;
    for (int i = 0; i < g.n_angles(); i += cfg.simulate_every_kth_angle)
        scatter_subset.push_back(i);
    std::vector<int> all_angles(g.n_angles());
    for (int i = 0; i < g.n_angles(); ++i)
        all_angles[i] = i;

    // One-time path: intensities to attenuation line integrals.
    const ProjectionStack a = intensity_to_attenuation(raw_intensity, flatfield);
    const Vec3 voxel = default_voxel_size(g, cfg.recon_dims);

    CorrectionResult out;
    out.corrected_stack = a;
    std::vector<IterationReport> reports;

    Volume previous = fbp_reconstruct(a, g, cfg.recon_dims, voxel, RampWindow::hann, cfg.workers);

    for (int iter = 1; iter <= cfg.n_iterations; ++iter) {
        IterationReport rep;
        rep.iteration = iter;
        const auto iter_start = Clock::now();

        // Segmentation of the current best volume into the density phantom.
        auto t0 = Clock::now();
        const VoxelPhantom phantom = stage(iter, "segmentation", [&] {
            const std::vector<double> thresholds = otsu_thresholds(previous, cfg.n_classes);
            const SegmentationResult seg = segment_volume(previous, thresholds, cfg.class_map);
            // MC grid matching the reconstruction keeps tracing cheap.
            return to_density_phantom(previous, seg, cfg.recon_dims, materials);
        });
        rep.seconds_segmentation = seconds_since(t0);

        t0 = Clock::now();
        ScanResult scatter_run = stage(iter, "mc-scatter", [&] {
            return run_scan(phantom, g_mc, spec, resp, cfg.sim, scatter_subset,
                            ScanQuantity::scatter, cfg.workers);
        });
        rep.seconds_mc_scatter = seconds_since(t0);

        t0 = Clock::now();
        ScanResult primary_run = stage(iter, "mc-primary", [&] {
            return run_scan(phantom, g_mc, spec, resp, cfg.sim, all_angles,
                            ScanQuantity::primary, cfg.workers);
        });
        rep.seconds_mc_primary = seconds_since(t0);
        rep.mc_seconds_per_projection =
            rep.seconds_mc_scatter / static_cast<double>(scatter_subset.size());

        // Denoise first, then fill the angle gaps, then up-sample.
        t0 = Clock::now();
        ProjectionStack scatter_hi = make_stack(g.nu, g.nv, g.angles);
        ProjectionStack primary_hi = make_stack(g.nu, g.nv, g.angles);
        stage(iter, "postprocess", [&] {
            for (auto& img : scatter_run.scatter.images)
                img = sg_smooth(img, sg);
            ProjectionStack scatter_full =
                interpolate_angles(scatter_run.scatter, std::vector<double>(g.angles));
            for (int i = 0; i < g.n_angles(); ++i) {
                scatter_hi.images[i] = upsample_image(scatter_full.images[i], g.nu, g.nv);
                primary_hi.images[i] = upsample_image(primary_run.primary.images[i], g.nu, g.nv);
            }
            // cubic undershoot behind strong absorbers can push the nearly
            // extinct primary negative; it is physically positive, so floor
            // it at a vanishing fraction of the view's peak
            for (auto& img : primary_hi.images) {
                double peak = 0.0;
                for (double v : img.values)
                    peak = std::max(peak, v);
                const double floor_val = 1e-12 * peak;
                for (auto& v : img.values)
                    v = std::max(v, floor_val);
            }
            return 0;
        });
        rep.seconds_postprocess = seconds_since(t0);

        double frac_sum = 0.0;
        std::size_t frac_n = 0;
        for (int i = 0; i < g.n_angles(); ++i) {
            const auto& pv = primary_hi.images[i].values;
            const auto& sv = scatter_hi.images[i].values;
            for (std::size_t p = 0; p < pv.size(); ++p) {
                const double is = std::max(0.0, sv[p]);
                if (pv[p] + is > 0.0) {
                    frac_sum += is / (pv[p] + is);
                    ++frac_n;
                }
            }
        }
        rep.mean_scatter_fraction = frac_n ? frac_sum / frac_n : 0.0;

        // Correction always restarts from the original corrupted stack.
        t0 = Clock::now();
        out.corrected_stack = stage(iter, "correction", [&] {
            return correct_projections(a, primary_hi, scatter_hi, &rep.negative_scatter_clamped);
        });
        rep.seconds_correction = seconds_since(t0);

        t0 = Clock::now();
        Volume corrected = stage(iter, "fbp", [&] {
            return fbp_reconstruct(out.corrected_stack, g, cfg.recon_dims, voxel,
                                   RampWindow::hann, cfg.workers);
        });
        rep.seconds_fbp = seconds_since(t0);

        rep.ncc_to_previous = ncc(std::span<const float>(corrected.values),
                                  std::span<const float>(previous.values));
        previous = std::move(corrected);

        rep.seconds_total = seconds_since(iter_start);
        reports.push_back(rep);
    }

    out.corrected_volume = std::move(previous);
    out.reports = std::move(reports);
    return out;
}

} // namespace xscat
