#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "support/stats.hpp"
#include "xscat/constants.hpp"
#include "xscat/cross_sections.hpp"
#include "xscat/material.hpp"
#include "xscat/samplers.hpp"

using namespace xscat;
using testsupport::simpson;
namespace fs = std::filesystem;

namespace {

const fs::path kData = XSCAT_DATA_DIR;

Material water() { return load_material(kData / "materials" / "water.mat"); }
Material aluminum() { return load_material(kData / "materials" / "aluminum.mat"); }

// Material with S identically `s_const` and F identically `f_const` over a
// huge q range: isolates the Klein-Nishina / Thomson cores.
Material flat_factor_material(double s_const, double f_const)
{
    Material m;
    m.name = "flat";
    m.z_eff = f_const;
    m.density_ref = 1.0;
    std::vector<double> e{1.0, 1000.0};
    m.mu = Table1D(e, {1.0, 1.0}, "mu");
    m.sigma_incoh = Table1D(e, {1.0, 1.0}, "incoh");
    m.sigma_coh = Table1D(e, {1.0, 1.0}, "coh");
    m.sigma_pe = Table1D(e, {1.0, 1.0}, "pe");
    // S jumps to the plateau immediately; S(0) must be 0 by invariant
    m.s_factor = Table1D({0.0, 1e-9, 1e4}, {0.0, s_const, s_const}, "S");
    m.f_factor = Table1D({0.0, 1e4}, {f_const, f_const}, "F");
    m.f2_q2_cdf = {0.0, f_const * f_const * 1e8};
    return m;
}

// chi-square of sampled theta values against a PDF over solid angle
template <typename Sampler, typename Pdf>
double theta_chi2_p(Sampler&& draw, Pdf&& pdf, std::size_t n_samples, int bins)
{
    std::vector<std::size_t> observed(bins, 0);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double theta = draw();
        int b = static_cast<int>(theta / constants::pi * bins);
        b = std::clamp(b, 0, bins - 1);
        ++observed[b];
    }
    std::vector<double> expected(bins);
    for (int b = 0; b < bins; ++b) {
        const double lo = constants::pi * b / bins;
        const double hi = constants::pi * (b + 1) / bins;
        expected[b] = simpson([&](double th) { return pdf(th) * std::sin(th); }, lo, hi, 64);
    }
    return testsupport::chi2_gof_p(observed, expected);
}

} // namespace

TEST_CASE("incoherent differential cross section: forward suppression and free-electron limit")
{
    const Material al = aluminum();
    CHECK(d_sigma_compton(al, 100.0, 0.0) == 0.0); // S(0) = 0

    const Material free_e = flat_factor_material(1.0, 1.0);
    const double r0 = constants::r0_cm;
    CHECK(d_sigma_compton(free_e, 100.0, 0.0) == doctest::Approx(r0 * r0).epsilon(1e-9));
    CHECK_THROWS_AS(d_sigma_compton(al, 100.0, -0.1), std::domain_error);
    CHECK_THROWS_AS(d_sigma_compton(al, 100.0, 4.0), std::domain_error);
}

TEST_CASE("coherent differential cross section: Thomson limits")
{
    const Material al = aluminum();
    const double r0 = constants::r0_cm;
    CHECK(d_sigma_rayleigh(al, 100.0, 0.0) ==
          doctest::Approx(r0 * r0 * al.z_eff * al.z_eff).epsilon(1e-9));

    const Material f1 = flat_factor_material(1.0, 1.0);
    CHECK(d_sigma_rayleigh(f1, 100.0, constants::pi / 2) ==
          doctest::Approx(0.5 * r0 * r0).epsilon(1e-12));
}

TEST_CASE("differential cross sections are non-negative and continuous in theta")
{
    const Material w = water();
    const int steps = 2880;
    for (double e : {60.0, 100.0, 200.0}) {
        std::vector<double> c(steps + 1), r(steps + 1);
        double max_c = 0.0, max_r = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const double th = constants::pi * i / steps;
            c[i] = d_sigma_compton(w, e, th);
            r[i] = d_sigma_rayleigh(w, e, th);
            CHECK(c[i] >= 0.0);
            CHECK(r[i] >= 0.0);
            max_c = std::max(max_c, c[i]);
            max_r = std::max(max_r, r[i]);
        }
        // continuity: per-step change bounded by a small fraction of the peak
        for (int i = 1; i <= steps; ++i) {
            CHECK(std::abs(c[i] - c[i - 1]) < 0.05 * max_c);
            CHECK(std::abs(r[i] - r[i - 1]) < 0.2 * max_r);
        }
    }
}

TEST_CASE("flat S reduces sample_compton to pure Kahn Klein-Nishina sampling")
{
    const Material free_e = flat_factor_material(2.0, 1.0);
    const double e_kev = 100.0;
    CounterRng rng(4242);
    auto pdf = [&](double th) {
        const double ratio = compton_energy_ratio(e_kev, th);
        const double s = std::sin(th);
        return ratio * ratio * (ratio + 1.0 / ratio - s * s);
    };
    const double p = theta_chi2_p(
        [&] { return sample_compton(free_e, e_kev, rng).theta; }, pdf, 1000000, 64);
    CHECK(p > 0.01);
}

TEST_CASE("every Compton sample satisfies the energy-shift relation exactly")
{
    const Material w = water();
    CounterRng rng(7);
    const double e_kev = 150.0;
    const double alpha = e_kev / constants::mec2_kev;
    for (int i = 0; i < 20000; ++i) {
        const ComptonSample s = sample_compton(w, e_kev, rng);
        const double expect = alpha / (1.0 + alpha * (1.0 - std::cos(s.theta)));
        CHECK(s.alpha_prime == doctest::Approx(expect).epsilon(1e-15));
        CHECK(s.alpha_prime > 0.0);
        CHECK(s.alpha_prime <= alpha);
        CHECK(s.theta >= 0.0);
        CHECK(s.theta <= constants::pi);
        CHECK(s.phi >= 0.0);
        CHECK(s.phi < 2.0 * constants::pi);
    }
}

TEST_CASE("sampled Compton angles match the S-modified Klein-Nishina PDF")
{
    for (const Material& m : {water(), aluminum()}) {
        for (double e : {60.0, 200.0}) {
            CounterRng rng(1234);
            const double p = theta_chi2_p(
                [&] { return sample_compton(m, e, rng).theta; },
                [&](double th) { return d_sigma_compton(m, e, th); }, 400000, 64);
            CAPTURE(m.name);
            CAPTURE(e);
            CHECK(p > 0.01);
        }
    }
}

TEST_CASE("flat F reduces sample_rayleigh to Thomson sampling (symmetric cosine)")
{
    const Material f1 = flat_factor_material(1.0, 1.0);
    CounterRng rng(11);
    const std::size_t n = 400000;
    double sum_c = 0.0, sum_c2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(sample_rayleigh(f1, 100.0, rng).theta);
        sum_c += c;
        sum_c2 += c * c;
    }
    // Thomson: E[cos] = 0, E[cos^2] = 2/5
    const double mean = sum_c / n;
    const double var = sum_c2 / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(var / n));
    CHECK(sum_c2 / n == doctest::Approx(0.4).epsilon(0.01));
}

TEST_CASE("sampled Rayleigh angles match the F^2-modified Thomson PDF")
{
    for (const Material& m : {water(), aluminum()}) {
        for (double e : {60.0, 100.0}) {
            CounterRng rng(77);
            const double p = theta_chi2_p(
                [&] { return sample_rayleigh(m, e, rng).theta; },
                [&](double th) { return d_sigma_rayleigh(m, e, th); }, 400000, 64);
            CAPTURE(m.name);
            CAPTURE(e);
            CHECK(p > 0.01);
        }
    }
}

TEST_CASE("Rayleigh sampling passes a KS test against the numeric CDF")
{
    const Material m = aluminum();
    const double e = 100.0;
    // numeric CDF over cos(theta) via fine integration of the PDF
    const int grid = 4096;
    std::vector<double> cdf(grid + 1, 0.0);
    for (int i = 1; i <= grid; ++i) {
        const double lo = constants::pi * (i - 1) / grid;
        const double hi = constants::pi * i / grid;
        cdf[i] = cdf[i - 1] +
                 simpson([&](double th) { return d_sigma_rayleigh(m, e, th) * std::sin(th); },
                         lo, hi, 16);
    }
    for (auto& v : cdf)
        v /= cdf[grid];

    CounterRng rng(31);
    const std::size_t n = 1000000;
    std::vector<double> us(n);
    for (auto& u : us) {
        const double theta = sample_rayleigh(m, e, rng).theta;
        const double pos = theta / constants::pi * grid;
        const int idx = std::clamp(static_cast<int>(pos), 0, grid - 1);
        u = cdf[idx] + (pos - idx) * (cdf[idx + 1] - cdf[idx]);
    }
    std::sort(us.begin(), us.end());
    double d_stat = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        d_stat = std::max({d_stat, std::abs(us[i] - static_cast<double>(i) / n),
                           std::abs(us[i] - static_cast<double>(i + 1) / n)});
    CHECK(testsupport::ks_p_value(d_stat, n) > 0.01);
}

TEST_CASE("interaction selection follows the tabulated cross-section ratios")
{
    // pe = coh = 0: always Compton
    {
        Material m = flat_factor_material(5.0, 5.0);
        m.sigma_pe = Table1D({1.0, 1000.0}, {0.0, 0.0}, "pe");
        m.sigma_coh = Table1D({1.0, 1000.0}, {0.0, 0.0}, "coh");
        CounterRng rng(1);
        for (int i = 0; i < 1000; ++i)
            CHECK(select_interaction(m, 60.0, rng) == Interaction::compton);
    }
    // equal cross sections: 1/3 each within 3 sigma at 1e5 draws
    {
        const Material m = flat_factor_material(5.0, 5.0);
        CounterRng rng(2);
        std::size_t counts[3] = {0, 0, 0};
        const std::size_t n = 100000;
        for (std::size_t i = 0; i < n; ++i)
            ++counts[static_cast<int>(select_interaction(m, 60.0, rng))];
        const double se = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
        for (auto c : counts)
            CHECK(std::abs(static_cast<double>(c) - n / 3.0) < 3.0 * se);
    }
    // water at 60 keV: frequencies match the loaded table ratios
    {
        const Material w = water();
        const double pe = sigma_pe_at(w, 60.0);
        const double ic = sigma_incoh_at(w, 60.0);
        const double co = sigma_coh_at(w, 60.0);
        const double tot = pe + ic + co;
        CounterRng rng(3);
        std::size_t counts[3] = {0, 0, 0};
        const std::size_t n = 200000;
        for (std::size_t i = 0; i < n; ++i)
            ++counts[static_cast<int>(select_interaction(w, 60.0, rng))];
        const double probs[3] = {pe / tot, ic / tot, co / tot};
        for (int k = 0; k < 3; ++k) {
            const double se = std::sqrt(n * probs[k] * (1 - probs[k]));
            CHECK(std::abs(static_cast<double>(counts[k]) - n * probs[k]) < 3.5 * se);
        }
    }
    // all three zero: non-physical table
    {
        Material m = flat_factor_material(5.0, 5.0);
        m.sigma_pe = Table1D({1.0, 1000.0}, {0.0, 0.0}, "pe");
        m.sigma_coh = Table1D({1.0, 1000.0}, {0.0, 0.0}, "coh");
        m.sigma_incoh = Table1D({1.0, 1000.0}, {0.0, 0.0}, "incoh");
        CounterRng rng(4);
        CHECK_THROWS_AS(select_interaction(m, 60.0, rng), std::runtime_error);
    }
}

TEST_CASE("scatter probability densities: zeros, normalization, algebraic ratio")
{
    const Material w = water();
    CHECK(p_lambda_compton(w, 100.0, 0.0) == 0.0); // S(0) = 0

    // integral of p/(2pi) over the sphere is 1 (0.5% tolerance): this ties
    // the sigma tables to the differential forms
    for (const Material& m : {water(), aluminum()}) {
        for (double e : {60.0, 100.0, 200.0}) {
            const double ic = simpson(
                [&](double th) { return p_lambda_compton(m, e, th) * std::sin(th); }, 0.0,
                constants::pi, 4096);
            const double co = simpson(
                [&](double th) { return p_lambda_rayleigh(m, e, th) * std::sin(th); }, 0.0,
                constants::pi, 4096);
            CAPTURE(m.name);
            CAPTURE(e);
            CHECK(ic == doctest::Approx(1.0).epsilon(0.005));
            CHECK(co == doctest::Approx(1.0).epsilon(0.005));
        }
    }

    // p / dsigma = 2 pi / sigma, independent of theta
    const double sigma_cm2 = sigma_incoh_at(w, 80.0) * constants::barn_cm2;
    for (double th : {0.3, 1.0, 2.0, 3.0}) {
        const double ratio = p_lambda_compton(w, 80.0, th) / d_sigma_compton(w, 80.0, th);
        CHECK(ratio == doctest::Approx(2.0 * constants::pi / sigma_cm2).epsilon(1e-12));
    }

    // vanishing sigma: error
    Material z = flat_factor_material(1.0, 1.0);
    z.sigma_incoh = Table1D({1.0, 1000.0}, {0.0, 0.0}, "incoh");
    CHECK_THROWS_AS(p_lambda_compton(z, 60.0, 1.0), std::runtime_error);
}

TEST_CASE("rotate_direction preserves unit length and the polar angle")
{
    CounterRng rng(8);
    Vec3 dir{0.0, 0.0, 1.0};
    for (int i = 0; i < 2000; ++i) {
        const double theta = rng.uniform() * constants::pi;
        const double phi = rng.uniform() * 2.0 * constants::pi;
        const Vec3 next = rotate_direction(dir, theta, phi);
        CHECK(std::abs(norm(next) - 1.0) < 1e-12);
        CHECK(dot(next, dir) == doctest::Approx(std::cos(theta)).epsilon(1e-9));
        dir = next;
    }
}
