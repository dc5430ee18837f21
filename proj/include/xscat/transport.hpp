#pragma once
#include <cstdint>
#include <vector>

#include "xscat/detector_image.hpp"
#include "xscat/detector_response.hpp"
#include "xscat/phantom.hpp"
#include "xscat/rng.hpp"
#include "xscat/scan_geometry.hpp"
#include "xscat/spectrum.hpp"

namespace xscat {

struct PhotonState {
    Vec3 position;     // cm
    Vec3 direction;    // unit
    double energy = 0.0; // keV
    double weight = 0.0;
    int generation = 0; // interactions so far
};

struct SimConfig {
    std::uint64_t photons_total = 10000;
    int splitting = 1;               // pseudo-particles scored per interaction
    double roulette_survival = 0.5;  // in (0, 1]
    double roulette_wmin_rel = 1e-3; // threshold relative to the history's initial weight; 0 disables
    int step_voxels = 1;             // scoring step of point-detector attenuation rays
    int max_interactions = 50;
    std::uint64_t seed = 0;
    bool track_variance = false;
};

void validate_sim_config(const SimConfig& cfg);

// Weight bookkeeping across a run; with roulette disabled every history ends
// in exactly one of the first three buckets, so
// initial == escaped + absorbed + culled.
struct WeightLedger {
    double initial = 0.0;
    double escaped = 0.0;
    double absorbed = 0.0;
    double culled = 0.0;          // hit the interaction cap
    double roulette_killed = 0.0;
    double roulette_boost = 0.0;  // weight added to survivors

    WeightLedger& operator+=(const WeightLedger& o)
    {
        initial += o.initial;
        escaped += o.escaped;
        absorbed += o.absorbed;
        culled += o.culled;
        roulette_killed += o.roulette_killed;
        roulette_boost += o.roulette_boost;
        return *this;
    }
};

struct SimResult {
    DetectorImage image;
    WeightLedger ledger;
    std::uint64_t histories = 0;
    double total = 0.0;          // sum over the image
    double total_std_error = 0.0; // standard error of `total` over histories
};

// Photons per spectrum bin: largest-remainder apportionment of
// photons_total over the bin weights; every positive-weight bin gets at
// least one history.
std::vector<std::uint64_t> apportion_photons(const Spectrum& spec, std::uint64_t photons_total);

// Source emission toward a uniformly sampled point of the detector
// rectangle; the weight carries the area-to-solid-angle factor so that a
// unit-strength bin produces detector fluence 1/d^2 (inverse square law).
struct Emission {
    Vec3 direction;
    double weight = 0.0; // A_det * cos(psi) / d^2, before the 1/M_n share
};
Emission sample_emission(const ScanGeometry& g, int angle_idx, CounterRng& rng);

// One next-event contribution: response * p(direction) * W / (2 pi d^2) *
// exp(-tau), times the pixel-choice compensation n_pixels. Linear in the
// weight, inverse-square in the interaction-to-pixel distance.
double point_detector_score(double response_factor, double p_dir, double weight,
                            double n_pixels, double d2, double tau);

// Point-detector scatter estimate for one projection angle: next-event
// scoring at a randomly selected pixel, with particle splitting and Russian
// roulette. Deterministic for a fixed seed at any worker count.
SimResult simulate_scatter_stats(const VoxelPhantom& ph, const ScanGeometry& g, int angle_idx,
                                 const Spectrum& spec, const DetectorResponse& resp,
                                 const SimConfig& cfg, int workers = 1);

DetectorImage simulate_scatter(const VoxelPhantom& ph, const ScanGeometry& g, int angle_idx,
                               const Spectrum& spec, const DetectorResponse& resp,
                               const SimConfig& cfg, int workers = 1);

// Deterministic primary projection: per-pixel spectrum quadrature of the
// attenuated inverse-square fluence times the detector response, with the
// exact voxel-walk line integral (step 1).
DetectorImage simulate_primary(const VoxelPhantom& ph, const ScanGeometry& g, int angle_idx,
                               const Spectrum& spec, const DetectorResponse& resp,
                               const SimConfig& cfg, int workers = 1);

enum class ScanQuantity { primary, scatter, both };

struct ScanResult {
    ProjectionStack primary;
    ProjectionStack scatter;
    std::vector<double> seconds_per_angle; // scatter+primary wall time per simulated angle
};

// Runs the angle subset, splitting the per-angle history chunks across
// workers. Per-angle output bits are independent of the worker count.
ScanResult run_scan(const VoxelPhantom& ph, const ScanGeometry& g, const Spectrum& spec,
                    const DetectorResponse& resp, const SimConfig& cfg,
                    const std::vector<int>& angle_subset, ScanQuantity what, int workers);

} // namespace xscat
