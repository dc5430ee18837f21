#pragma once
#include <filesystem>
#include <optional>
#include <vector>

namespace xscat {

// Per-angle detector image; values are energy-weighted intensity in units
// consistent between primary and scatter estimates. The optional variance
// plane holds per-pixel sample variance of the per-history contributions.
struct DetectorImage {
    int nu = 0, nv = 0;
    std::vector<double> values;
    std::optional<std::vector<double>> variance;

    DetectorImage() = default;
    DetectorImage(int nu_, int nv_) : nu(nu_), nv(nv_), values(static_cast<std::size_t>(nu_) * nv_, 0.0) {}

    double& at(int iu, int iv) { return values[static_cast<std::size_t>(iv) * nu + iu]; }
    double at(int iu, int iv) const { return values[static_cast<std::size_t>(iv) * nu + iu]; }
    std::size_t pixel_count() const { return values.size(); }
};

void validate_image(const DetectorImage& img);

// Stack of per-angle images sharing one detector grid. angle_values carries
// the trajectory angles (radians) of each slot.
struct ProjectionStack {
    int nu = 0, nv = 0;
    std::vector<double> angle_values;
    std::vector<DetectorImage> images;

    int n_angles() const { return static_cast<int>(images.size()); }
};

ProjectionStack make_stack(int nu, int nv, std::vector<double> angle_values);

// XPRJ1 binary format (little-endian): magic "XPRJ1" (5 bytes), nu, nv,
// n_angles (u32), then angle-major f32 pixel data (row-major per image).
void save_stack(const ProjectionStack& s, const std::filesystem::path& path);
ProjectionStack load_stack(const std::filesystem::path& path, std::vector<double> angle_values = {});

} // namespace xscat
