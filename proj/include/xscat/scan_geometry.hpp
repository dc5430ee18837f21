#pragma once
#include <optional>
#include <vector>

#include "xscat/vec3.hpp"

namespace xscat {

struct Ray {
    Vec3 origin;    // cm
    Vec3 direction; // unit
};

// Circular cone-beam layout. The phantom stays fixed; source and flat-panel
// detector rotate about the vertical (z) axis around the isocenter at the
// world origin. At angle a the source sits at sod*(cos a, sin a, 0) and the
// detector center at -(sdd-sod)*(cos a, sin a, 0); detector u runs along
// (-sin a, cos a, 0), v along +z. Pixel coordinate u (real-valued) has the
// center of pixel column i at u = i.
struct ScanGeometry {
    double sdd = 0.0; // source-detector distance, cm
    double sod = 0.0; // source-object (isocenter) distance, cm
    int nu = 0, nv = 0;
    double pixel_pitch = 0.0; // cm
    std::vector<double> angles; // radians, strictly increasing in [0, 2pi)

    int n_angles() const { return static_cast<int>(angles.size()); }
    double detector_area() const { return nu * nv * pixel_pitch * pixel_pitch; }
    double pixel_area() const { return pixel_pitch * pixel_pitch; }

    Vec3 source_position(int angle_idx) const;
    Vec3 detector_center(int angle_idx) const;
    Vec3 detector_u_axis(int angle_idx) const;
    Vec3 detector_v_axis() const { return {0.0, 0.0, 1.0}; }
    // Unit normal of the detector plane pointing back toward the source.
    Vec3 detector_normal(int angle_idx) const;

    // World position of real-valued pixel coordinates (u,v).
    Vec3 pixel_position(int angle_idx, double u, double v) const;
};

void validate_geometry(const ScanGeometry& g);

// Uniform circular trajectory with n angles over [0, 2pi).
ScanGeometry make_circular_geometry(double sdd, double sod, int nu, int nv, double pixel_pitch,
                                    int n_angles);

// Ray from the source through pixel (u,v); u,v may be fractional.
Ray pixel_ray(const ScanGeometry& g, int angle_idx, double u, double v);

// Projects a world point through the source onto the detector plane.
// Returns the real-valued pixel coordinates, or nullopt when the projection
// misses the detector or the point does not lie in front of it.
std::optional<std::pair<double, double>> point_to_pixel(const ScanGeometry& g, int angle_idx,
                                                        const Vec3& point);

} // namespace xscat
