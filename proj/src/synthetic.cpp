#include "xscat/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "xscat/constants.hpp"

namespace xscat {

namespace {

Vec3 voxel_center(const VoxelPhantom& ph, int ix, int iy, int iz)
{
    return {ph.origin.x + (ix + 0.5) * ph.voxel_size.x,
            ph.origin.y + (iy + 0.5) * ph.voxel_size.y,
            ph.origin.z + (iz + 0.5) * ph.voxel_size.z};
}

void fill_cylinder(VoxelPhantom& ph, double cx, double cy, double radius, double half_height,
                   std::uint8_t id, float density)
{
    const double r2 = radius * radius;
    for (int iz = 0; iz < ph.dims[2]; ++iz)
        for (int iy = 0; iy < ph.dims[1]; ++iy)
            for (int ix = 0; ix < ph.dims[0]; ++ix) {
                const Vec3 p = voxel_center(ph, ix, iy, iz);
                const double dx = p.x - cx, dy = p.y - cy;
                if (dx * dx + dy * dy <= r2 && std::abs(p.z) <= half_height) {
                    const std::size_t cell = ph.index(ix, iy, iz);
                    ph.material_id[cell] = id;
                    ph.density[cell] = density;
                }
            }
}

} // namespace

VoxelPhantom make_cube_phantom(int n, double voxel_cm, double edge_cm, const Material& material,
                               double density)
{
    if (!(edge_cm > 0.0))
        throw std::invalid_argument("cube phantom: edge must be > 0");
    VoxelPhantom ph = make_empty_phantom(n, n, n, {voxel_cm, voxel_cm, voxel_cm}, {material});
    const double half = 0.5 * edge_cm;
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const Vec3 p = voxel_center(ph, ix, iy, iz);
                if (std::abs(p.x) <= half && std::abs(p.y) <= half && std::abs(p.z) <= half) {
                    const std::size_t cell = ph.index(ix, iy, iz);
                    ph.material_id[cell] = 1;
                    ph.density[cell] = static_cast<float>(density);
                }
            }
    return ph;
}

VoxelPhantom make_cylinder_phantom(int n, double voxel_cm, double radius_cm, double height_cm,
                                   const Material& material, double density)
{
    if (!(radius_cm > 0.0) || !(height_cm > 0.0))
        throw std::invalid_argument("cylinder phantom: radius and height must be > 0");
    VoxelPhantom ph = make_empty_phantom(n, n, n, {voxel_cm, voxel_cm, voxel_cm}, {material});
    fill_cylinder(ph, 0.0, 0.0, radius_cm, 0.5 * height_cm, 1, static_cast<float>(density));
    return ph;
}

VoxelPhantom make_rods_phantom(int n, double voxel_cm, double body_radius_cm, double height_cm,
                               const Material& body, double body_density, int n_rods,
                               double rod_radius_cm, double ring_radius_cm, const Material& rod,
                               double rod_density)
{
    if (!(body_radius_cm > 0.0) || !(rod_radius_cm > 0.0))
        throw std::invalid_argument("rods phantom: radii must be > 0");
    if (n_rods < 1)
        throw std::invalid_argument("rods phantom: need at least one rod");
    if (ring_radius_cm + rod_radius_cm > body_radius_cm)
        throw std::invalid_argument("rods phantom: rods extend outside the body");
    VoxelPhantom ph =
        make_empty_phantom(n, n, n, {voxel_cm, voxel_cm, voxel_cm}, {body, rod});
    const double half = 0.5 * height_cm;
    fill_cylinder(ph, 0.0, 0.0, body_radius_cm, half, 1, static_cast<float>(body_density));
    for (int k = 0; k < n_rods; ++k) {
        const double phi = 2.0 * constants::pi * k / n_rods;
        fill_cylinder(ph, ring_radius_cm * std::cos(phi), ring_radius_cm * std::sin(phi),
                      rod_radius_cm, half, 2, static_cast<float>(rod_density));
    }
    return ph;
}

VoxelPhantom make_cylinder_head_phantom(int n, double voxel_cm, const Material& body,
                                        double body_density, const Material& insert,
                                        double insert_density)
{
    const double extent = n * voxel_cm;
    const double body_r = 0.42 * extent;
    const double height = 0.8 * extent;
    VoxelPhantom ph =
        make_empty_phantom(n, n, n, {voxel_cm, voxel_cm, voxel_cm}, {body, insert});
    const double half = 0.5 * height;
    fill_cylinder(ph, 0.0, 0.0, body_r, half, 1, static_cast<float>(body_density));
    // four air bores
    for (int k = 0; k < 4; ++k) {
        const double phi = 2.0 * constants::pi * (k + 0.5) / 4.0;
        fill_cylinder(ph, 0.55 * body_r * std::cos(phi), 0.55 * body_r * std::sin(phi),
                      0.18 * body_r, half * 0.9, 0, 0.0f);
    }
    // ring of dense inserts (valve-spring stand-ins)
    for (int k = 0; k < 8; ++k) {
        const double phi = 2.0 * constants::pi * k / 8.0;
        fill_cylinder(ph, 0.8 * body_r * std::cos(phi), 0.8 * body_r * std::sin(phi),
                      0.07 * body_r, half * 0.8, 2, static_cast<float>(insert_density));
    }
    return ph;
}

} // namespace xscat
