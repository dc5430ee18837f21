#include "xscat/volume.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace xscat {

Volume make_volume(int nx, int ny, int nz, const Vec3& voxel_size)
{
    if (nx <= 0 || ny <= 0 || nz <= 0)
        throw std::runtime_error("volume: dims must be positive");
    Volume v;
    v.dims = {nx, ny, nz};
    v.voxel_size = voxel_size;
    v.values.assign(v.voxel_count(), 0.0f);
    return v;
}

void save_volume(const Volume& v, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write volume " + path.string());
    out.write("XVOL1", 5);
    for (int d : v.dims) {
        const std::uint32_t u = static_cast<std::uint32_t>(d);
        out.write(reinterpret_cast<const char*>(&u), sizeof u);
    }
    for (double s : {v.voxel_size.x, v.voxel_size.y, v.voxel_size.z})
        out.write(reinterpret_cast<const char*>(&s), sizeof s);
    out.write(reinterpret_cast<const char*>(v.values.data()), v.values.size() * sizeof(float));
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

Volume load_volume(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open volume " + path.string());
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "XVOL1", 5) != 0)
        throw std::runtime_error(path.string() + ": bad magic (expected XVOL1)");
    std::uint32_t d[3];
    in.read(reinterpret_cast<char*>(d), sizeof d);
    Volume v;
    in.read(reinterpret_cast<char*>(&v.voxel_size.x), sizeof(double));
    in.read(reinterpret_cast<char*>(&v.voxel_size.y), sizeof(double));
    in.read(reinterpret_cast<char*>(&v.voxel_size.z), sizeof(double));
    v.dims = {static_cast<int>(d[0]), static_cast<int>(d[1]), static_cast<int>(d[2])};
    v.values.resize(v.voxel_count());
    in.read(reinterpret_cast<char*>(v.values.data()), v.values.size() * sizeof(float));
    if (!in)
        throw std::runtime_error(path.string() + ": truncated volume data");
    return v;
}

DetectorImage volume_slice_z(const Volume& v, int iz)
{
    if (iz < 0 || iz >= v.dims[2])
        throw std::out_of_range("volume_slice_z: slice index out of range");
    DetectorImage img(v.dims[0], v.dims[1]);
    for (int iy = 0; iy < v.dims[1]; ++iy)
        for (int ix = 0; ix < v.dims[0]; ++ix)
            img.at(ix, iy) = v.at(ix, iy, iz);
    return img;
}

void save_slice_pgm(const Volume& v, int iz, const std::filesystem::path& path, double lo,
                    double hi)
{
    const DetectorImage img = volume_slice_z(v, iz);
    if (!(hi > lo)) {
        lo = *std::min_element(img.values.begin(), img.values.end());
        hi = *std::max_element(img.values.begin(), img.values.end());
        if (!(hi > lo))
            hi = lo + 1.0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << img.nu << " " << img.nv << "\n255\n";
    for (double val : img.values) {
        const double t = std::clamp((val - lo) / (hi - lo), 0.0, 1.0);
        const unsigned char byte = static_cast<unsigned char>(t * 255.0 + 0.5);
        out.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

void save_slice_csv(const Volume& v, int iz, const std::filesystem::path& path)
{
    const DetectorImage img = volume_slice_z(v, iz);
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    for (int iy = 0; iy < img.nv; ++iy) {
        for (int ix = 0; ix < img.nu; ++ix)
            out << img.at(ix, iy) << (ix + 1 == img.nu ? '\n' : ',');
    }
}

} // namespace xscat
