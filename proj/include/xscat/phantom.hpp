#pragma once
#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "xscat/material.hpp"
#include "xscat/vec3.hpp"

namespace xscat {

// Voxelized object: per-voxel material id and bulk density on a regular grid.
// material id 0 is reserved for vacuum (density 0). Storage is x-fastest.
struct VoxelPhantom {
    std::array<int, 3> dims{0, 0, 0};
    Vec3 voxel_size;  // cm
    Vec3 origin;      // world coordinates of the low corner, cm
    std::vector<std::uint8_t> material_id;
    std::vector<float> density; // g/cm^3
    std::vector<Material> materials; // index 0 = vacuum sentinel

    std::size_t voxel_count() const
    {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int ix, int iy, int iz) const
    {
        return static_cast<std::size_t>(ix) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(iy) + static_cast<std::size_t>(dims[1]) * iz);
    }
    Vec3 extent() const
    {
        return {dims[0] * voxel_size.x, dims[1] * voxel_size.y, dims[2] * voxel_size.z};
    }
    Vec3 center() const { return origin + extent() * 0.5; }
};

// Vacuum placeholder for material id 0.
Material vacuum_material();

// Grid sized (nx,ny,nz) with the given voxel size, centered on the origin of
// the world frame, filled with vacuum.
VoxelPhantom make_empty_phantom(int nx, int ny, int nz, const Vec3& voxel_size,
                                std::vector<Material> materials);

void validate_phantom(const VoxelPhantom& ph);

// XVOX1 binary format (little-endian):
//   magic "XVOX1" (5 bytes), nx,ny,nz (u32), voxel size sx,sy,sz (f64),
//   origin x,y,z (f64), material count (u32), material_id (u8, x-fastest),
//   density (f32, x-fastest).
// Material tables are not embedded; the caller binds ids to loaded materials.
void save_phantom(const VoxelPhantom& ph, const std::filesystem::path& path);
VoxelPhantom load_phantom(const std::filesystem::path& path, std::vector<Material> materials);

struct PhantomHeader {
    std::array<int, 3> dims{0, 0, 0};
    Vec3 voxel_size;
    Vec3 origin;
    std::uint32_t material_count = 0;
};

// Header fields only; no material binding or voxel data.
PhantomHeader load_phantom_header(const std::filesystem::path& path);

} // namespace xscat
