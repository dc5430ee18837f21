#include "xscat/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace xscat {

namespace {

template <typename T>
double mean_of(std::span<const T> x)
{
    double s = 0.0;
    for (T v : x)
        s += v;
    return s / x.size();
}

template <typename T>
double ncc_impl(std::span<const T> x1, std::span<const T> x2)
{
    if (x1.size() != x2.size() || x1.empty())
        throw std::invalid_argument("ncc: size mismatch");
    const double m1 = mean_of(x1), m2 = mean_of(x2);
    double cov = 0.0, v1 = 0.0, v2 = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const double a = x1[i] - m1, b = x2[i] - m2;
        cov += a * b;
        v1 += a * a;
        v2 += b * b;
    }
    if (!(v1 > 0.0) || !(v2 > 0.0))
        throw std::runtime_error("ncc: zero variance input");
    return cov / std::sqrt(v1 * v2);
}

void check_rect(const DetectorImage& img, int row, int col, int h, int w, const char* what)
{
    if (row < 0 || col < 0 || h <= 0 || w <= 0 || row + h > img.nv || col + w > img.nu)
        throw std::invalid_argument(std::string("cnr: ") + what + " rectangle outside image");
}

} // namespace

double mse(std::span<const double> x1, std::span<const double> x2)
{
    if (x1.size() != x2.size() || x1.empty())
        throw std::invalid_argument("mse: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const double d = x1[i] - x2[i];
        s += d * d;
    }
    return s / x1.size();
}

double mse(const DetectorImage& x1, const DetectorImage& x2)
{
    if (x1.nu != x2.nu || x1.nv != x2.nv)
        throw std::invalid_argument("mse: image dims mismatch");
    return mse(std::span<const double>(x1.values), std::span<const double>(x2.values));
}

double ncc(std::span<const double> x1, std::span<const double> x2) { return ncc_impl(x1, x2); }
double ncc(std::span<const float> x1, std::span<const float> x2) { return ncc_impl(x1, x2); }

double ncc(const DetectorImage& x1, const DetectorImage& x2)
{
    if (x1.nu != x2.nu || x1.nv != x2.nv)
        throw std::invalid_argument("ncc: image dims mismatch");
    return ncc(std::span<const double>(x1.values), std::span<const double>(x2.values));
}

double cnr(const DetectorImage& img, const RoiSpec& roi)
{
    check_rect(img, roi.roi_row, roi.roi_col, roi.roi_h, roi.roi_w, "ROI");
    check_rect(img, roi.bg_row, roi.bg_col, roi.bg_h, roi.bg_w, "background");
    const bool overlap = roi.roi_row < roi.bg_row + roi.bg_h &&
                         roi.bg_row < roi.roi_row + roi.roi_h &&
                         roi.roi_col < roi.bg_col + roi.bg_w &&
                         roi.bg_col < roi.roi_col + roi.roi_w;
    if (overlap)
        throw std::invalid_argument("cnr: ROI and background rectangles overlap");

    double roi_sum = 0.0;
    for (int r = roi.roi_row; r < roi.roi_row + roi.roi_h; ++r)
        for (int c = roi.roi_col; c < roi.roi_col + roi.roi_w; ++c)
            roi_sum += img.at(c, r);
    const double roi_mean = roi_sum / (static_cast<double>(roi.roi_h) * roi.roi_w);

    double bg_sum = 0.0;
    const double bg_n = static_cast<double>(roi.bg_h) * roi.bg_w;
    for (int r = roi.bg_row; r < roi.bg_row + roi.bg_h; ++r)
        for (int c = roi.bg_col; c < roi.bg_col + roi.bg_w; ++c)
            bg_sum += img.at(c, r);
    const double bg_mean = bg_sum / bg_n;
    double bg_var = 0.0;
    for (int r = roi.bg_row; r < roi.bg_row + roi.bg_h; ++r)
        for (int c = roi.bg_col; c < roi.bg_col + roi.bg_w; ++c) {
            const double d = img.at(c, r) - bg_mean;
            bg_var += d * d;
        }
    bg_var /= bg_n; // population
    if (!(bg_var > 0.0))
        throw std::runtime_error("cnr: zero background standard deviation");
    return std::abs(roi_mean - bg_mean) / std::sqrt(bg_var);
}

std::vector<double> profile_line(const DetectorImage& img, int row0, int row1, int col0,
                                 int col1)
{
    if (row0 < 0 || col0 < 0 || row1 > img.nv || col1 > img.nu || row0 >= row1 || col0 >= col1)
        throw std::invalid_argument("profile_line: empty or out-of-bounds range");
    std::vector<double> line(col1 - col0, 0.0);
    for (int c = col0; c < col1; ++c) {
        double s = 0.0;
        for (int r = row0; r < row1; ++r)
            s += img.at(c, r);
        line[c - col0] = s / (row1 - row0);
    }
    return line;
}

} // namespace xscat
