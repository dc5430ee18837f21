#include "xscat/scan_geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "xscat/constants.hpp"

namespace xscat {

void validate_geometry(const ScanGeometry& g)
{
    if (!(g.sod > 0.0 && g.sdd > g.sod))
        throw std::runtime_error("geometry: require 0 < sod < sdd");
    if (g.nu <= 0 || g.nv <= 0)
        throw std::runtime_error("geometry: detector pixel counts must be positive");
    if (!(g.pixel_pitch > 0.0))
        throw std::runtime_error("geometry: pixel pitch must be positive");
    if (g.angles.empty())
        throw std::runtime_error("geometry: no angles");
    for (std::size_t i = 0; i < g.angles.size(); ++i) {
        if (g.angles[i] < 0.0 || g.angles[i] >= 2.0 * constants::pi)
            throw std::runtime_error("geometry: angles must lie in [0, 2pi)");
        if (i > 0 && !(g.angles[i] > g.angles[i - 1]))
            throw std::runtime_error("geometry: angles must be strictly increasing");
    }
}

ScanGeometry make_circular_geometry(double sdd, double sod, int nu, int nv, double pixel_pitch,
                                    int n_angles)
{
    ScanGeometry g;
    g.sdd = sdd;
    g.sod = sod;
    g.nu = nu;
    g.nv = nv;
    g.pixel_pitch = pixel_pitch;
    g.angles.resize(n_angles);
    for (int i = 0; i < n_angles; ++i)
        g.angles[i] = 2.0 * constants::pi * i / n_angles;
    validate_geometry(g);
    return g;
}

Vec3 ScanGeometry::source_position(int angle_idx) const
{
    const double a = angles.at(angle_idx);
    return {sod * std::cos(a), sod * std::sin(a), 0.0};
}

Vec3 ScanGeometry::detector_center(int angle_idx) const
{
    const double a = angles.at(angle_idx);
    const double r = sdd - sod;
    return {-r * std::cos(a), -r * std::sin(a), 0.0};
}

Vec3 ScanGeometry::detector_u_axis(int angle_idx) const
{
    const double a = angles.at(angle_idx);
    return {-std::sin(a), std::cos(a), 0.0};
}

Vec3 ScanGeometry::detector_normal(int angle_idx) const
{
    const double a = angles.at(angle_idx);
    return {std::cos(a), std::sin(a), 0.0};
}

Vec3 ScanGeometry::pixel_position(int angle_idx, double u, double v) const
{
    const Vec3 c = detector_center(angle_idx);
    const Vec3 ua = detector_u_axis(angle_idx);
    const Vec3 va = detector_v_axis();
    const double du = (u + 0.5 - 0.5 * nu) * pixel_pitch;
    const double dv = (v + 0.5 - 0.5 * nv) * pixel_pitch;
    return c + ua * du + va * dv;
}

Ray pixel_ray(const ScanGeometry& g, int angle_idx, double u, double v)
{
    const Vec3 s = g.source_position(angle_idx);
    return Ray{s, normalized(g.pixel_position(angle_idx, u, v) - s)};
}

std::optional<std::pair<double, double>> point_to_pixel(const ScanGeometry& g, int angle_idx,
                                                        const Vec3& point)
{
    const Vec3 s = g.source_position(angle_idx);
    const Vec3 n = g.detector_normal(angle_idx);
    const Vec3 c = g.detector_center(angle_idx);
    const double denom = dot(point - s, n);
    if (!(denom < 0.0)) // behind the source or parallel to the plane
        return std::nullopt;
    const double t = dot(c - s, n) / denom;
    if (!(t > 0.0))
        return std::nullopt;
    const Vec3 q = s + (point - s) * t;
    const double u = dot(q - c, g.detector_u_axis(angle_idx)) / g.pixel_pitch + 0.5 * g.nu - 0.5;
    const double v = dot(q - c, g.detector_v_axis()) / g.pixel_pitch + 0.5 * g.nv - 0.5;
    if (u < -0.5 || u >= g.nu - 0.5 || v < -0.5 || v >= g.nv - 0.5)
        return std::nullopt;
    return std::make_pair(u, v);
}

} // namespace xscat
