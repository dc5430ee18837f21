#include "xscat/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "xscat/constants.hpp"
#include "xscat/cross_sections.hpp"
#include "xscat/samplers.hpp"
#include "xscat/trace.hpp"
#include "xscat/worker_pool.hpp"

namespace xscat {

namespace {

// Fixed chunk count per angle; history -> chunk assignment and the final
// chunk summation order never depend on the worker count, which is what
// makes the output bit-reproducible.
constexpr int kChunks = 64;

} // namespace

void validate_sim_config(const SimConfig& cfg)
{
    if (cfg.photons_total < 1)
        throw std::runtime_error("sim config: photons_total must be >= 1");
    if (cfg.splitting < 1)
        throw std::runtime_error("sim config: splitting must be >= 1");
    if (!(cfg.roulette_survival > 0.0 && cfg.roulette_survival <= 1.0))
        throw std::runtime_error("sim config: roulette_survival must lie in (0,1]");
    if (cfg.roulette_wmin_rel < 0.0)
        throw std::runtime_error("sim config: roulette_wmin_rel must be >= 0");
    if (cfg.step_voxels < 1)
        throw std::runtime_error("sim config: step_voxels must be >= 1");
    if (cfg.max_interactions < 1)
        throw std::runtime_error("sim config: max_interactions must be >= 1");
}

std::vector<std::uint64_t> apportion_photons(const Spectrum& spec, std::uint64_t photons_total)
{
    const double w_total = spec.total_weight();
    const std::size_t n = spec.bins.size();
    std::vector<std::uint64_t> counts(n, 0);
    std::vector<std::pair<double, std::size_t>> fractions;
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double quota = photons_total * spec.bins[i].weight / w_total;
        counts[i] = static_cast<std::uint64_t>(quota);
        assigned += counts[i];
        fractions.emplace_back(quota - counts[i], i);
    }
    std::stable_sort(fractions.begin(), fractions.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < photons_total && k < fractions.size(); ++k, ++assigned)
        ++counts[fractions[k].second];
    // Every bin that carries weight must be sampled, or its scatter is lost.
    for (std::size_t i = 0; i < n; ++i)
        if (spec.bins[i].weight > 0.0 && counts[i] == 0)
            counts[i] = 1;
    return counts;
}

double point_detector_score(double response_factor, double p_dir, double weight,
                            double n_pixels, double d2, double tau)
{
    return response_factor * p_dir * weight * n_pixels / (2.0 * constants::pi * d2) *
           std::exp(-tau);
}

Emission sample_emission(const ScanGeometry& g, int angle_idx, CounterRng& rng)
{
    const Vec3 src = g.source_position(angle_idx);
    const Vec3 c = g.detector_center(angle_idx);
    const Vec3 ua = g.detector_u_axis(angle_idx);
    const Vec3 va = g.detector_v_axis();
    const double xu = (rng.uniform() - 0.5) * g.nu * g.pixel_pitch;
    const double xv = (rng.uniform() - 0.5) * g.nv * g.pixel_pitch;
    const Vec3 target = c + ua * xu + va * xv;
    const Vec3 delta = target - src;
    const double d2 = dot(delta, delta);
    const Vec3 dir = delta / std::sqrt(d2);
    const double cos_psi = -dot(dir, g.detector_normal(angle_idx));
    return Emission{dir, g.detector_area() * cos_psi / d2};
}

namespace {

struct BinStats {
    double sum_t = 0.0, sum_t2 = 0.0;
    std::uint64_t n = 0;
};

struct ChunkAccum {
    DetectorImage image;
    std::vector<double> var_sum_c;  // per-pixel sum of per-history contributions
    std::vector<double> var_sum_c2; // per-pixel sum of squared per-history contributions
    WeightLedger ledger;
    std::vector<BinStats> bins;
};

struct ScatterContext {
    const VoxelPhantom& ph;
    const ScanGeometry& g;
    int angle_idx;
    const Spectrum& spec;
    const DetectorResponse& resp;
    const SimConfig& cfg;
    std::vector<std::uint64_t> photons_per_bin;
};

void run_history(const ScatterContext& ctx, int bin, std::uint64_t photon, ChunkAccum& acc,
                 std::vector<std::pair<std::size_t, double>>& history_pixels)
{
    const auto& cfg = ctx.cfg;
    const auto& g = ctx.g;
    const double bin_weight = ctx.spec.bins[bin].weight;
    const double n_pixels = static_cast<double>(g.nu) * g.nv;

    CounterRng rng(cfg.seed, static_cast<std::uint32_t>(ctx.angle_idx),
                   static_cast<std::uint32_t>(bin), static_cast<std::uint32_t>(photon));

    const Emission em = sample_emission(g, ctx.angle_idx, rng);
    const double w0 = bin_weight * em.weight / static_cast<double>(ctx.photons_per_bin[bin]);
    const double w_min = cfg.roulette_wmin_rel * w0;

    PhotonState state;
    state.position = g.source_position(ctx.angle_idx);
    state.direction = em.direction;
    state.energy = ctx.spec.bins[bin].energy_kev;
    state.weight = w0;

    acc.ledger.initial += w0;
    history_pixels.clear();
    double history_total = 0.0;

    MuField mu(ctx.ph, state.energy);
    for (;;) {
        const FreePathResult fp =
            sample_free_path(ctx.ph, Ray{state.position, state.direction}, mu, rng.uniform());
        if (fp.escaped) {
            acc.ledger.escaped += state.weight;
            break;
        }
        state.position = fp.point;
        const std::size_t cell = ctx.ph.index(fp.ix, fp.iy, fp.iz);
        const Material& mat = ctx.ph.materials[ctx.ph.material_id[cell]];

        const Interaction kind = select_interaction(mat, state.energy, rng);
        if (kind == Interaction::photoelectric) {
            acc.ledger.absorbed += state.weight;
            break;
        }

        // Next-event scoring: each pseudo-particle picks one detector pixel
        // uniformly at random; the 1/n_pixels choice probability is
        // compensated in the score so the image stays an unbiased estimate
        // of the per-pixel fluence response.
        const double w_split = state.weight / cfg.splitting;
        for (int s = 0; s < cfg.splitting; ++s) {
            const int iu = std::min(static_cast<int>(rng.uniform() * g.nu), g.nu - 1);
            const int iv = std::min(static_cast<int>(rng.uniform() * g.nv), g.nv - 1);
            const Vec3 pix = g.pixel_position(ctx.angle_idx, iu, iv);
            const Vec3 delta = pix - state.position;
            const double d2 = dot(delta, delta);
            const Vec3 to_det = delta / std::sqrt(d2);
            const double cos_t = std::clamp(dot(state.direction, to_det), -1.0, 1.0);
            const double theta = std::acos(cos_t);

            double p_dir, e_out;
            if (kind == Interaction::compton) {
                p_dir = p_lambda_compton(mat, state.energy, theta);
                e_out = state.energy * compton_energy_ratio(state.energy, theta);
            } else {
                p_dir = p_lambda_rayleigh(mat, state.energy, theta);
                e_out = state.energy;
            }
            const double tau =
                trace_attenuation(ctx.ph, Ray{state.position, to_det}, e_out, cfg.step_voxels);
            const double x = point_detector_score(ctx.resp.response_factor(e_out), p_dir,
                                                  w_split, n_pixels, d2, tau);
            if (!std::isfinite(x))
                throw std::runtime_error(
                    "simulate_scatter: non-finite contribution (angle " +
                    std::to_string(ctx.angle_idx) + ", bin " + std::to_string(bin) + ", E " +
                    std::to_string(state.energy) + " keV) - physics tables corrupt?");
            const std::size_t pixel = static_cast<std::size_t>(iv) * g.nu + iu;
            acc.image.values[pixel] += x;
            history_total += x;
            if (cfg.track_variance)
                history_pixels.emplace_back(pixel, x);
        }

        // One real continuation with a sampled direction; the scatter PDFs
        // are normalized, so the weight is unchanged by scattering itself.
        if (kind == Interaction::compton) {
            const ComptonSample cs = sample_compton(mat, state.energy, rng);
            state.direction = rotate_direction(state.direction, cs.theta, cs.phi);
            state.energy = cs.alpha_prime * constants::mec2_kev;
            mu = MuField(ctx.ph, state.energy);
        } else {
            const RayleighSample rs = sample_rayleigh(mat, state.energy, rng);
            state.direction = rotate_direction(state.direction, rs.theta, rs.phi);
        }
        ++state.generation;
        if (state.generation >= cfg.max_interactions) {
            acc.ledger.culled += state.weight;
            break;
        }

        if (w_min > 0.0 && state.weight < w_min) {
            if (rng.uniform() < cfg.roulette_survival) {
                const double boosted = state.weight / cfg.roulette_survival;
                acc.ledger.roulette_boost += boosted - state.weight;
                state.weight = boosted;
            } else {
                acc.ledger.roulette_killed += state.weight;
                break;
            }
        }
    }

    auto& bs = acc.bins[bin];
    bs.sum_t += history_total;
    bs.sum_t2 += history_total * history_total;
    ++bs.n;

    if (cfg.track_variance && !history_pixels.empty()) {
        std::sort(history_pixels.begin(), history_pixels.end());
        std::size_t i = 0;
        while (i < history_pixels.size()) {
            const std::size_t pixel = history_pixels[i].first;
            double c = 0.0;
            while (i < history_pixels.size() && history_pixels[i].first == pixel)
                c += history_pixels[i++].second;
            acc.var_sum_c[pixel] += c;
            acc.var_sum_c2[pixel] += c * c;
        }
    }
}

} // namespace

SimResult simulate_scatter_stats(const VoxelPhantom& ph, const ScanGeometry& g, int angle_idx,
                                 const Spectrum& spec, const DetectorResponse& resp,
                                 const SimConfig& cfg, int workers)
{
    validate_sim_config(cfg);
    validate_spectrum(spec);
    validate_geometry(g);
    if (angle_idx < 0 || angle_idx >= g.n_angles())
        throw std::out_of_range("simulate_scatter: angle index out of range");

    ScatterContext ctx{ph, g, angle_idx, spec, resp, cfg,
                       apportion_photons(spec, cfg.photons_total)};
    const std::size_t n_pix = static_cast<std::size_t>(g.nu) * g.nv;

    std::vector<ChunkAccum> chunks(kChunks);
    parallel_for(kChunks, workers, [&](std::size_t c) {
        ChunkAccum& acc = chunks[c];
        acc.image = DetectorImage(g.nu, g.nv);
        acc.bins.resize(spec.bins.size());
        if (cfg.track_variance) {
            acc.var_sum_c.assign(n_pix, 0.0);
            acc.var_sum_c2.assign(n_pix, 0.0);
        }
        std::vector<std::pair<std::size_t, double>> scratch;
        for (std::size_t bin = 0; bin < spec.bins.size(); ++bin) {
            const std::uint64_t m = ctx.photons_per_bin[bin];
            if (m == 0)
                continue;
            const std::uint64_t begin = m * c / kChunks;
            const std::uint64_t end = m * (c + 1) / kChunks;
            for (std::uint64_t j = begin; j < end; ++j)
                run_history(ctx, static_cast<int>(bin), j, acc, scratch);
        }
    });

    SimResult out;
    out.image = DetectorImage(g.nu, g.nv);
    std::vector<BinStats> bins(spec.bins.size());
    std::vector<double> var_c, var_c2;
    if (cfg.track_variance) {
        var_c.assign(n_pix, 0.0);
        var_c2.assign(n_pix, 0.0);
    }
    for (const auto& acc : chunks) { // fixed order
        for (std::size_t i = 0; i < n_pix; ++i)
            out.image.values[i] += acc.image.values[i];
        out.ledger += acc.ledger;
        for (std::size_t bin = 0; bin < bins.size(); ++bin) {
            bins[bin].sum_t += acc.bins[bin].sum_t;
            bins[bin].sum_t2 += acc.bins[bin].sum_t2;
            bins[bin].n += acc.bins[bin].n;
        }
        if (cfg.track_variance) {
            for (std::size_t i = 0; i < n_pix; ++i) {
                var_c[i] += acc.var_sum_c[i];
                var_c2[i] += acc.var_sum_c2[i];
            }
        }
    }

    double var_total = 0.0;
    for (const auto& bs : bins) {
        out.histories += bs.n;
        out.total += bs.sum_t;
        if (bs.n > 1) {
            const double s2 = (bs.sum_t2 - bs.sum_t * bs.sum_t / bs.n) / (bs.n - 1);
            var_total += bs.n * std::max(0.0, s2);
        }
    }
    out.total_std_error = std::sqrt(var_total);

    if (cfg.track_variance) {
        const double n = static_cast<double>(out.histories);
        auto& var = out.image.variance.emplace(n_pix, 0.0);
        for (std::size_t i = 0; i < n_pix; ++i)
            var[i] = std::max(0.0, var_c2[i] - var_c[i] * var_c[i] / n) * n / std::max(1.0, n - 1.0);
    }
    return out;
}

DetectorImage simulate_scatter(const VoxelPhantom& ph, const ScanGeometry& g, int angle_idx,
                               const Spectrum& spec, const DetectorResponse& resp,
                               const SimConfig& cfg, int workers)
{
    return simulate_scatter_stats(ph, g, angle_idx, spec, resp, cfg, workers).image;
}

DetectorImage simulate_primary(const VoxelPhantom& ph, const ScanGeometry& g, int angle_idx,
                               const Spectrum& spec, const DetectorResponse& resp,
                               const SimConfig& cfg, int workers)
{
    validate_sim_config(cfg);
    validate_spectrum(spec);
    validate_geometry(g);
    if (angle_idx < 0 || angle_idx >= g.n_angles())
        throw std::out_of_range("simulate_primary: angle index out of range");

    const std::size_t n_bins = spec.bins.size();
    const std::size_t n_mats = ph.materials.size();
    // mass attenuation per (bin, material); vacuum column stays zero
    std::vector<double> atten(n_bins * n_mats, 0.0);
    std::vector<double> response(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        response[b] = resp.response_factor(spec.bins[b].energy_kev);
        for (std::size_t m = 1; m < n_mats; ++m)
            if (ph.materials[m].has_tables())
                atten[b * n_mats + m] = ph.materials[m].mu.loglog(spec.bins[b].energy_kev);
    }

    DetectorImage img(g.nu, g.nv);
    const Vec3 src = g.source_position(angle_idx);
    parallel_for(g.nv, workers, [&](std::size_t row) {
        std::vector<double> rho_len(n_mats);
        const int iv = static_cast<int>(row);
        for (int iu = 0; iu < g.nu; ++iu) {
            const Vec3 pix = g.pixel_position(angle_idx, iu, iv);
            const Vec3 delta = pix - src;
            const double d2 = dot(delta, delta);
            const Ray ray{src, delta / std::sqrt(d2)};
            trace_rho_lengths(ph, ray, rho_len);
            double value = 0.0;
            for (std::size_t b = 0; b < n_bins; ++b) {
                double tau = 0.0;
                for (std::size_t m = 1; m < n_mats; ++m)
                    tau += atten[b * n_mats + m] * rho_len[m];
                value += spec.bins[b].weight * response[b] * std::exp(-tau) / d2;
            }
            img.at(iu, iv) = value;
        }
    });
    return img;
}

ScanResult run_scan(const VoxelPhantom& ph, const ScanGeometry& g, const Spectrum& spec,
                    const DetectorResponse& resp, const SimConfig& cfg,
                    const std::vector<int>& angle_subset, ScanQuantity what, int workers)
{
    if (angle_subset.empty())
        throw std::runtime_error("run_scan: empty angle subset");
    validate_sim_config(cfg);
    validate_geometry(g);

    std::vector<double> angle_values;
    for (int idx : angle_subset) {
        if (idx < 0 || idx >= g.n_angles())
            throw std::out_of_range("run_scan: angle index " + std::to_string(idx) +
                                    " out of range");
        angle_values.push_back(g.angles[idx]);
    }

    ScanResult out;
    const bool want_primary = what != ScanQuantity::scatter;
    const bool want_scatter = what != ScanQuantity::primary;
    if (want_primary)
        out.primary = make_stack(g.nu, g.nv, angle_values);
    if (want_scatter)
        out.scatter = make_stack(g.nu, g.nv, angle_values);
    out.seconds_per_angle.resize(angle_subset.size(), 0.0);

    for (std::size_t i = 0; i < angle_subset.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (want_scatter)
                out.scatter.images[i] =
                    simulate_scatter(ph, g, angle_subset[i], spec, resp, cfg, workers);
            if (want_primary)
                out.primary.images[i] =
                    simulate_primary(ph, g, angle_subset[i], spec, resp, cfg, workers);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_scan: angle index " + std::to_string(angle_subset[i]) +
                                     ": " + e.what());
        }
        out.seconds_per_angle[i] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return out;
}

} // namespace xscat
