#include "xscat/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xscat/constants.hpp"
#include "xscat/cross_sections.hpp"

namespace xscat {

double kahn_sample_cos_theta(double alpha, CounterRng& rng)
{
    const double t = 1.0 + 2.0 * alpha;
    for (;;) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        const double r3 = rng.uniform();
        if (r1 <= t / (t + 8.0)) {
            const double x = 1.0 + 2.0 * alpha * r2;
            if (r3 <= 4.0 * (1.0 / x - 1.0 / (x * x)))
                return 1.0 - (x - 1.0) / alpha;
        } else {
            const double x = t / (1.0 + 2.0 * alpha * r2);
            const double cos_th = 1.0 - (x - 1.0) / alpha;
            if (r3 <= 0.5 * (cos_th * cos_th + 1.0 / x))
                return cos_th;
        }
    }
}

ComptonSample sample_compton(const Material& m, double energy_kev, CounterRng& rng)
{
    const double alpha = energy_kev / constants::mec2_kev;
    const double q_max = momentum_transfer(energy_kev, constants::pi);
    const double s_max = form_factor_S(m, q_max);
    if (!(s_max > 0.0))
        throw std::runtime_error("sample_compton: S vanishes over the kinematic range at " +
                                 std::to_string(energy_kev) + " keV");
    for (;;) {
        const double cos_th = kahn_sample_cos_theta(alpha, rng);
        const double theta = std::acos(std::clamp(cos_th, -1.0, 1.0));
        const double s = form_factor_S(m, momentum_transfer(energy_kev, theta));
        if (rng.uniform() * s_max <= s) {
            ComptonSample out;
            out.theta = theta;
            out.alpha_prime = alpha / (1.0 + alpha * (1.0 - std::cos(theta)));
            out.phi = 2.0 * constants::pi * rng.uniform();
            return out;
        }
    }
}

namespace {

// Integral of F(q)^2 dq^2 from segment start q0 to q0 + u, for the linear
// segment F = a + b (q - q0).
double segment_mass(double q0, double a, double b, double u)
{
    const double c0 = a * a, c1 = 2.0 * a * b, c2 = b * b;
    return 2.0 * (c0 * q0 * u + (c0 + c1 * q0) * u * u / 2.0 + (c1 + c2 * q0) * u * u * u / 3.0 +
                  c2 * u * u * u * u / 4.0);
}

// Cumulative F^2 dq^2 mass up to q (handles the clamped tail beyond the
// table, where F holds its last value).
double cumulative_mass(const Material& m, double q)
{
    const auto& knots = m.f_factor.xs();
    const auto& fv = m.f_factor.ys();
    const auto& cdf = m.f2_q2_cdf;
    if (q >= knots.back()) {
        const double f_last = fv.back();
        return cdf.back() + f_last * f_last * (q * q - knots.back() * knots.back());
    }
    std::size_t lo = 0, hi = knots.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (knots[mid] <= q)
            lo = mid;
        else
            hi = mid;
    }
    const double a = fv[lo];
    const double b = (fv[lo + 1] - fv[lo]) / (knots[lo + 1] - knots[lo]);
    return cdf[lo] + segment_mass(knots[lo], a, b, q - knots[lo]);
}

// Inverts the cumulative mass by bisection (monotone; 64 halvings are exact
// enough for any downstream use and keep the sampler deterministic).
double invert_mass(const Material& m, double target, double q_hi)
{
    double lo = 0.0, hi = q_hi;
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cumulative_mass(m, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

RayleighSample sample_rayleigh(const Material& m, double energy_kev, CounterRng& rng)
{
    const double q_max = momentum_transfer(energy_kev, constants::pi);
    const double total = cumulative_mass(m, q_max);
    if (!(total > 0.0))
        throw std::runtime_error("sample_rayleigh: F vanishes over the kinematic range at " +
                                 std::to_string(energy_kev) + " keV");
    const double scale = constants::hc_kev_angstrom / energy_kev;
    for (;;) {
        const double q = invert_mass(m, rng.uniform() * total, q_max);
        const double sin_half = std::min(q * scale, 1.0);
        const double cos_th = 1.0 - 2.0 * sin_half * sin_half;
        if (rng.uniform() * 2.0 <= 1.0 + cos_th * cos_th) {
            RayleighSample out;
            out.theta = std::acos(std::clamp(cos_th, -1.0, 1.0));
            out.phi = 2.0 * constants::pi * rng.uniform();
            return out;
        }
    }
}

Vec3 rotate_direction(const Vec3& dir, double theta, double phi)
{
    const Vec3 pick = std::abs(dir.x) < 0.5 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    const Vec3 e1 = normalized(cross(dir, pick));
    const Vec3 e2 = cross(dir, e1);
    const double st = std::sin(theta), ct = std::cos(theta);
    return normalized(dir * ct + (e1 * std::cos(phi) + e2 * std::sin(phi)) * st);
}

} // namespace xscat
