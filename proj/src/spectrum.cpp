#include "xscat/spectrum.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xscat {

void validate_spectrum(const Spectrum& s)
{
    if (s.bins.empty())
        throw std::runtime_error("spectrum: no bins");
    double positive = 0.0;
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
        const auto& b = s.bins[i];
        if (!std::isfinite(b.energy_kev) || !std::isfinite(b.weight))
            throw std::runtime_error("spectrum: non-finite entry");
        if (!(b.weight >= 0.0))
            throw std::runtime_error("spectrum: negative weight");
        if (i > 0 && !(b.energy_kev > s.bins[i - 1].energy_kev))
            throw std::runtime_error("spectrum: non-monotone abscissa");
        positive += b.weight;
    }
    if (!(positive > 0.0))
        throw std::runtime_error("spectrum: all weights zero");
    if (s.bins.front().energy_kev < 1.0 || s.bins.back().energy_kev > 1000.0)
        throw std::runtime_error("spectrum: energies must lie within [1 keV, 1 MeV]");
}

Spectrum load_spectrum(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open spectrum file " + path.string());
    Spectrum s;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        for (auto& c : line)
            if (c == ',')
                c = ' ';
        std::istringstream row(line);
        double e = 0.0, w = 0.0;
        if (!(row >> e))
            continue; // blank line
        if (!(row >> w))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected two columns (keV, weight)");
        s.bins.push_back({e, w});
    }
    validate_spectrum(s);
    return s;
}

void save_spectrum(const Spectrum& s, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write spectrum file " + path.string());
    out << "# keV, relative fluence\n";
    char buf[80];
    for (const auto& b : s.bins) {
        std::snprintf(buf, sizeof buf, "%.17g, %.17g\n", b.energy_kev, b.weight);
        out << buf;
    }
}

} // namespace xscat
