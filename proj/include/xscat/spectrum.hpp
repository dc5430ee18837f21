#pragma once
#include <filesystem>
#include <vector>

namespace xscat {

struct SpectrumBin {
    double energy_kev = 0.0;
    double weight = 0.0; // relative fluence, dimensionless
};

// Discrete source spectrum. Energies strictly increasing within
// [1 keV, 1 MeV]; weights >= 0 with at least one positive.
struct Spectrum {
    std::vector<SpectrumBin> bins;

    double total_weight() const
    {
        double s = 0.0;
        for (const auto& b : bins)
            s += b.weight;
        return s;
    }
    double e_min() const { return bins.front().energy_kev; }
    double e_max() const { return bins.back().energy_kev; }
};

// Two-column CSV (keV, weight); '#' comments allowed.
Spectrum load_spectrum(const std::filesystem::path& path);
void save_spectrum(const Spectrum& s, const std::filesystem::path& path);
void validate_spectrum(const Spectrum& s);

inline Spectrum monochromatic_spectrum(double energy_kev, double weight = 1.0)
{
    return Spectrum{{{energy_kev, weight}}};
}

} // namespace xscat
