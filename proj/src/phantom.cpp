#include "xscat/phantom.hpp"

#include <cstring>
#include <fstream>

namespace xscat {

Material vacuum_material()
{
    Material m;
    m.name = "vacuum";
    m.z_eff = 0.0;
    m.density_ref = 0.0;
    return m;
}

VoxelPhantom make_empty_phantom(int nx, int ny, int nz, const Vec3& voxel_size,
                                std::vector<Material> materials)
{
    VoxelPhantom ph;
    ph.dims = {nx, ny, nz};
    ph.voxel_size = voxel_size;
    ph.origin = Vec3{-nx * voxel_size.x, -ny * voxel_size.y, -nz * voxel_size.z} * 0.5;
    ph.material_id.assign(ph.voxel_count(), 0);
    ph.density.assign(ph.voxel_count(), 0.0f);
    if (materials.empty() || materials.front().name != "vacuum")
        materials.insert(materials.begin(), vacuum_material());
    ph.materials = std::move(materials);
    validate_phantom(ph);
    return ph;
}

void validate_phantom(const VoxelPhantom& ph)
{
    if (ph.dims[0] <= 0 || ph.dims[1] <= 0 || ph.dims[2] <= 0)
        throw std::runtime_error("phantom: dims must be positive");
    if (!(ph.voxel_size.x > 0.0 && ph.voxel_size.y > 0.0 && ph.voxel_size.z > 0.0))
        throw std::runtime_error("phantom: voxel size must be positive");
    if (ph.material_id.size() != ph.voxel_count() || ph.density.size() != ph.voxel_count())
        throw std::runtime_error("phantom: array size mismatch");
    if (ph.materials.empty())
        throw std::runtime_error("phantom: no material table");
    for (std::size_t i = 0; i < ph.material_id.size(); ++i) {
        const auto id = ph.material_id[i];
        if (id >= ph.materials.size())
            throw std::runtime_error("phantom: material id " + std::to_string(id) +
                                     " has no loaded material");
        if (id != 0 && !ph.materials[id].has_tables())
            throw std::runtime_error("phantom: material id " + std::to_string(id) +
                                     " (" + ph.materials[id].name + ") has no tables");
        if (!(ph.density[i] >= 0.0f))
            throw std::runtime_error("phantom: negative density");
        if (id == 0 && ph.density[i] != 0.0f)
            throw std::runtime_error("phantom: vacuum voxel with nonzero density");
    }
}

namespace {

template <typename T>
void write_raw(std::ofstream& out, const T& v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_raw(std::ifstream& in, T& v)
{
    in.read(reinterpret_cast<char*>(&v), sizeof v);
}

} // namespace

void save_phantom(const VoxelPhantom& ph, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write phantom file " + path.string());
    out.write("XVOX1", 5);
    for (int d : ph.dims)
        write_raw(out, static_cast<std::uint32_t>(d));
    for (double v : {ph.voxel_size.x, ph.voxel_size.y, ph.voxel_size.z})
        write_raw(out, v);
    for (double v : {ph.origin.x, ph.origin.y, ph.origin.z})
        write_raw(out, v);
    write_raw(out, static_cast<std::uint32_t>(ph.materials.size()));
    out.write(reinterpret_cast<const char*>(ph.material_id.data()), ph.material_id.size());
    out.write(reinterpret_cast<const char*>(ph.density.data()),
              ph.density.size() * sizeof(float));
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

PhantomHeader load_phantom_header(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open phantom file " + path.string());
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "XVOX1", 5) != 0)
        throw std::runtime_error(path.string() + ": bad magic (expected XVOX1)");
    PhantomHeader h;
    std::uint32_t nx = 0, ny = 0, nz = 0;
    read_raw(in, nx);
    read_raw(in, ny);
    read_raw(in, nz);
    read_raw(in, h.voxel_size.x);
    read_raw(in, h.voxel_size.y);
    read_raw(in, h.voxel_size.z);
    read_raw(in, h.origin.x);
    read_raw(in, h.origin.y);
    read_raw(in, h.origin.z);
    read_raw(in, h.material_count);
    if (!in)
        throw std::runtime_error(path.string() + ": truncated header");
    h.dims = {static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz)};
    return h;
}

VoxelPhantom load_phantom(const std::filesystem::path& path, std::vector<Material> materials)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open phantom file " + path.string());
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "XVOX1", 5) != 0)
        throw std::runtime_error(path.string() + ": bad magic (expected XVOX1)");

    VoxelPhantom ph;
    std::uint32_t nx = 0, ny = 0, nz = 0, n_materials = 0;
    read_raw(in, nx);
    read_raw(in, ny);
    read_raw(in, nz);
    read_raw(in, ph.voxel_size.x);
    read_raw(in, ph.voxel_size.y);
    read_raw(in, ph.voxel_size.z);
    read_raw(in, ph.origin.x);
    read_raw(in, ph.origin.y);
    read_raw(in, ph.origin.z);
    read_raw(in, n_materials);
    ph.dims = {static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz)};

    if (materials.empty() || materials.front().name != "vacuum")
        materials.insert(materials.begin(), vacuum_material());
    if (materials.size() < n_materials)
        throw std::runtime_error(path.string() + ": header declares " + std::to_string(n_materials) +
                                 " materials, only " + std::to_string(materials.size()) +
                                 " provided");
    ph.materials = std::move(materials);

    ph.material_id.resize(ph.voxel_count());
    ph.density.resize(ph.voxel_count());
    in.read(reinterpret_cast<char*>(ph.material_id.data()), ph.material_id.size());
    in.read(reinterpret_cast<char*>(ph.density.data()), ph.density.size() * sizeof(float));
    if (!in)
        throw std::runtime_error(path.string() + ": truncated voxel data");
    validate_phantom(ph);
    return ph;
}

} // namespace xscat
