#pragma once
#include <array>
#include <filesystem>
#include <vector>

#include "xscat/detector_image.hpp"
#include "xscat/vec3.hpp"

namespace xscat {

// Reconstructed attenuation volume; values in 1/m, grid centered on the
// isocenter, x-fastest storage.
struct Volume {
    std::array<int, 3> dims{0, 0, 0};
    Vec3 voxel_size; // cm
    std::vector<float> values;

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
    float at(int ix, int iy, int iz) const { return values[index(ix, iy, iz)]; }
    float& at(int ix, int iy, int iz) { return values[index(ix, iy, iz)]; }
};

Volume make_volume(int nx, int ny, int nz, const Vec3& voxel_size);

// XVOL1 binary format (little-endian): magic "XVOL1" (5 bytes), nx,ny,nz
// (u32), voxel size (f64 x3), f32 data x-fastest.
void save_volume(const Volume& v, const std::filesystem::path& path);
Volume load_volume(const std::filesystem::path& path);

// Axial slice (fixed z) as a 2D image, x across, y down.
DetectorImage volume_slice_z(const Volume& v, int iz);

// 8-bit PGM export of a slice, linearly windowed to [lo, hi]; lo >= hi auto-windows.
void save_slice_pgm(const Volume& v, int iz, const std::filesystem::path& path, double lo = 0.0,
                    double hi = 0.0);
void save_slice_csv(const Volume& v, int iz, const std::filesystem::path& path);

} // namespace xscat
