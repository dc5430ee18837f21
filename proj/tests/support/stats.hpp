#pragma once
// Statistical helpers for the test suites: goodness-of-fit p-values and a
// plain Simpson integrator. Kept independent of the library under test.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace testsupport {

// Regularized upper incomplete gamma Q(a, x) (series + continued fraction).
inline double gamma_q(double a, double x)
{
    if (x < 0.0 || a <= 0.0)
        throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0)
        return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, Q = 1 - P
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15)
                break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Q(a,x) by Lentz continued fraction
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300)
            d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300)
            c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

// Chi-square upper-tail p-value.
inline double chi2_p_value(double chi2, int dof)
{
    return gamma_q(0.5 * dof, 0.5 * chi2);
}

// Kolmogorov distribution tail Q_KS with the usual finite-n correction.
inline double ks_p_value(double d_stat, std::size_t n)
{
    const double sn = std::sqrt(static_cast<double>(n));
    const double t = d_stat * (sn + 0.12 + 0.11 / sn);
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-12)
            break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

template <typename F>
double simpson(F&& f, double a, double b, int n)
{
    if (n % 2)
        ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Chi-square test of observed counts against expected bin probabilities
// (probabilities need not sum exactly to 1; they are renormalized).
inline double chi2_gof_p(const std::vector<std::size_t>& observed,
                         const std::vector<double>& expected_weight)
{
    if (observed.size() != expected_weight.size())
        throw std::invalid_argument("chi2_gof_p: size mismatch");
    double n = 0.0, w = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        n += observed[i];
        w += expected_weight[i];
    }
    double chi2 = 0.0;
    int dof = -1; // normalization constraint
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * expected_weight[i] / w;
        if (e < 1e-12)
            continue;
        chi2 += (observed[i] - e) * (observed[i] - e) / e;
        ++dof;
    }
    return chi2_p_value(chi2, dof);
}

} // namespace testsupport
