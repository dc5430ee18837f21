#include "xscat/detector_image.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace xscat {

void validate_image(const DetectorImage& img)
{
    if (img.nu <= 0 || img.nv <= 0)
        throw std::runtime_error("detector image: dims must be positive");
    if (img.values.size() != static_cast<std::size_t>(img.nu) * img.nv)
        throw std::runtime_error("detector image: size mismatch");
    for (double v : img.values)
        if (!std::isfinite(v) || v < 0.0)
            throw std::runtime_error("detector image: negative or non-finite value");
}

ProjectionStack make_stack(int nu, int nv, std::vector<double> angle_values)
{
    ProjectionStack s;
    s.nu = nu;
    s.nv = nv;
    s.angle_values = std::move(angle_values);
    s.images.assign(s.angle_values.size(), DetectorImage(nu, nv));
    return s;
}

void save_stack(const ProjectionStack& s, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write projection stack " + path.string());
    out.write("XPRJ1", 5);
    const std::uint32_t header[3] = {static_cast<std::uint32_t>(s.nu),
                                     static_cast<std::uint32_t>(s.nv),
                                     static_cast<std::uint32_t>(s.images.size())};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    std::vector<float> row(static_cast<std::size_t>(s.nu) * s.nv);
    for (const auto& img : s.images) {
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] = static_cast<float>(img.values[i]);
        out.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
    }
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

ProjectionStack load_stack(const std::filesystem::path& path, std::vector<double> angle_values)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open projection stack " + path.string());
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "XPRJ1", 5) != 0)
        throw std::runtime_error(path.string() + ": bad magic (expected XPRJ1)");
    std::uint32_t header[3];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (!in)
        throw std::runtime_error(path.string() + ": truncated header");

    ProjectionStack s;
    s.nu = static_cast<int>(header[0]);
    s.nv = static_cast<int>(header[1]);
    const int n_angles = static_cast<int>(header[2]);
    if (!angle_values.empty() && static_cast<int>(angle_values.size()) != n_angles)
        throw std::runtime_error(path.string() + ": angle list size does not match file (" +
                                 std::to_string(angle_values.size()) + " vs " +
                                 std::to_string(n_angles) + ")");
    s.angle_values = angle_values.empty() ? std::vector<double>(n_angles, 0.0)
                                          : std::move(angle_values);
    s.images.assign(n_angles, DetectorImage(s.nu, s.nv));
    std::vector<float> row(static_cast<std::size_t>(s.nu) * s.nv);
    for (auto& img : s.images) {
        in.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(float));
        if (!in)
            throw std::runtime_error(path.string() + ": truncated pixel data");
        for (std::size_t i = 0; i < row.size(); ++i)
            img.values[i] = row[i];
    }
    return s;
}

} // namespace xscat
