#pragma once
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace xscat {

// One-dimensional lookup table with a strictly increasing abscissa.
// Queries are exact at knots. Log-log interpolation is used for attenuation
// style data (spans decades); segments touching a zero value fall back to
// linear since log-log is undefined there. No extrapolation: out-of-range
// queries throw.
class Table1D {
public:
    Table1D() = default;

    Table1D(std::vector<double> x, std::vector<double> y, std::string label = "table")
        : x_(std::move(x)), y_(std::move(y)), label_(std::move(label))
    {
        if (x_.size() != y_.size() || x_.empty())
            throw std::runtime_error(label_ + ": empty or mismatched table");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::runtime_error(label_ + ": non-monotone abscissa");
    }

    std::size_t size() const { return x_.size(); }
    bool empty() const { return x_.empty(); }
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }

    bool in_range(double x) const { return x >= x_.front() && x <= x_.back(); }

    double linear(double x) const
    {
        const auto [i, exact] = locate(x);
        if (exact)
            return y_[i];
        const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
        return y_[i] + t * (y_[i + 1] - y_[i]);
    }

    // Linear with clamping beyond both ends (used by the form factors, where
    // the clamp values are documented by the caller).
    double linear_clamped(double x) const
    {
        if (x <= x_.front())
            return y_.front();
        if (x >= x_.back())
            return y_.back();
        return linear(x);
    }

    double loglog(double x) const
    {
        const auto [i, exact] = locate(x);
        if (exact)
            return y_[i];
        if (y_[i] <= 0.0 || y_[i + 1] <= 0.0) {
            const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
            return y_[i] + t * (y_[i + 1] - y_[i]);
        }
        const double t = (std::log(x) - std::log(x_[i])) / (std::log(x_[i + 1]) - std::log(x_[i]));
        return std::exp(std::log(y_[i]) + t * (std::log(y_[i + 1]) - std::log(y_[i])));
    }

private:
    // Largest knot index i with x_[i] <= x; throws outside the table range.
    std::pair<std::size_t, bool> locate(double x) const
    {
        if (!(x >= x_.front() && x <= x_.back()))
            throw std::out_of_range(label_ + ": query " + std::to_string(x) + " outside [" +
                                    std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (x_[mid] <= x)
                lo = mid;
            else
                hi = mid;
        }
        if (x == x_[lo])
            return {lo, true};
        if (x == x_[hi])
            return {hi, true};
        return {lo, false};
    }

    std::vector<double> x_, y_;
    std::string label_;
};

} // namespace xscat
