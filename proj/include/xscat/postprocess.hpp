#pragma once
#include <vector>

#include "xscat/detector_image.hpp"

namespace xscat {

struct SgFilterSpec {
    int window = 15;   // odd, >= 5
    int polyorder = 3; // < window
};

void validate_sg_spec(const SgFilterSpec& f);

// Window size scaled from the (576,800)-class default of 15, kept odd and
// at least 5; smaller detectors get proportionally smaller windows.
SgFilterSpec default_sg_spec(int nu, int nv);

// Least-squares polynomial smoothing weights for a window covering relative
// offsets [-left, right], evaluated at offset 0. Exposed for the kernel
// oracle tests.
std::vector<double> sg_kernel(int left, int right, int polyorder);

// Separable 2D Savitzky-Golay smoothing; reproduces polynomial images up to
// `polyorder` exactly. Edges use the polynomial fit on the truncated
// one-sided window. Requires both image dimensions >= window.
DetectorImage sg_smooth(const DetectorImage& img, const SgFilterSpec& f);

// Per-pixel linear interpolation in angle from the stack's angles onto
// `target_angles` (sorted, containing the source angles; missing angles are
// bracketed with circular wraparound). Present angles pass through
// unchanged.
ProjectionStack interpolate_angles(const ProjectionStack& stack,
                                   const std::vector<double>& target_angles);

// Separable Catmull-Rom up-sampling with linear extrapolation past the
// borders; constants and linear ramps are reproduced exactly.
DetectorImage upsample_image(const DetectorImage& img, int nu_out, int nv_out);

// Block-average decimation onto a coarser grid (integer factors).
DetectorImage downsample_average(const DetectorImage& img, int nu_out, int nv_out);

} // namespace xscat
