#pragma once
#include <vector>

#include "xscat/detector_image.hpp"
#include "xscat/phantom.hpp"
#include "xscat/scan_geometry.hpp"
#include "xscat/volume.hpp"

namespace xscat {

enum class RampWindow { ramlak, hann };

// FDK reconstruction of a circular cone-beam scan from attenuation line
// integrals: cosine pre-weighting, row-wise ramp filtering, distance-weighted
// backprojection. Output values in 1/m on a grid centered at the isocenter.
// Requires at least two views spanning >= 180 degrees plus the fan angle.
Volume fbp_reconstruct(const ProjectionStack& stack, const ScanGeometry& g,
                       const std::array<int, 3>& out_dims, const Vec3& voxel_size,
                       RampWindow window = RampWindow::hann, int workers = 1);

// Natural voxel size: the detector FOV scaled to the isocenter divided by
// the largest requested dimension, isotropic.
Vec3 default_voxel_size(const ScanGeometry& g, const std::array<int, 3>& out_dims);

// Otsu thresholds maximizing the between-class variance over a histogram of
// the volume interior (a 5% border margin is excluded). Thresholds are
// returned as attenuation values (bin edges). Throws on a degenerate
// (constant) histogram.
std::vector<double> otsu_thresholds(const Volume& vol, int n_classes, int histogram_bins = 1024);

struct ClassSpec {
    int material_id = 0; // index into the phantom material table; 0 = vacuum
    double density = 0.0;
};

struct SegmentationResult {
    std::vector<double> thresholds;     // ascending
    std::vector<std::uint8_t> labels;   // per voxel of the source volume
    std::vector<ClassSpec> class_map;   // per label
};

SegmentationResult segment_volume(const Volume& vol, const std::vector<double>& thresholds,
                                  std::vector<ClassSpec> class_map);

// Downsamples the labeled volume onto target_dims: the label of each output
// voxel is the modal label of its block (ties resolved toward the higher
// label), the density is the block mean of the per-voxel class densities
// (vacuum-mode blocks stay at density 0).
VoxelPhantom to_density_phantom(const Volume& vol, const SegmentationResult& seg,
                                const std::array<int, 3>& target_dims,
                                std::vector<Material> materials);

// a = ln(flatfield / I) per pixel. Errors list the number of offending
// non-positive pixels (underexposure signal).
ProjectionStack intensity_to_attenuation(const ProjectionStack& intensity,
                                         const DetectorImage& flatfield);

} // namespace xscat
