#pragma once
#include <span>
#include <vector>

#include "xscat/detector_image.hpp"

namespace xscat {

// Rectangles in pixels: (row, col, height, width). The paper-style default
// is a 14x14 ROI.
struct RoiSpec {
    int roi_row = 0, roi_col = 0, roi_h = 14, roi_w = 14;
    int bg_row = 0, bg_col = 0, bg_h = 14, bg_w = 14;
};

double mse(std::span<const double> x1, std::span<const double> x2);
double mse(const DetectorImage& x1, const DetectorImage& x2);

// Normalized cross-correlation with population standard deviations; throws
// on zero variance.
double ncc(std::span<const double> x1, std::span<const double> x2);
double ncc(const DetectorImage& x1, const DetectorImage& x2);
double ncc(std::span<const float> x1, std::span<const float> x2);

// |mean(ROI) - mean(background)| / std(background), population std.
double cnr(const DetectorImage& img, const RoiSpec& roi);

// Column-wise mean over the row band [row0, row1) restricted to columns
// [col0, col1).
std::vector<double> profile_line(const DetectorImage& img, int row0, int row1, int col0,
                                 int col1);

} // namespace xscat
