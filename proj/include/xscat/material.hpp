#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "xscat/table.hpp"

namespace xscat {

// Energy-dependent cross sections and form factors for one (possibly
// pre-mixed) material. Immutable after load; safe to share across workers.
//
// Units: energies keV, mu mass attenuation cm^2/g, integrated cross sections
// barn per formula unit, momentum transfer q in 1/Angstrom.
struct Material {
    std::string name;
    double z_eff = 0.0;      // electrons per formula unit; F(0) = z_eff
    double density_ref = 0.0; // g/cm^3

    Table1D mu;           // (keV, cm^2/g), log-log interpolated
    Table1D sigma_incoh;  // (keV, barn)
    Table1D sigma_coh;    // (keV, barn)
    Table1D sigma_pe;     // (keV, barn)
    Table1D s_factor;     // (1/A, dimensionless), S(0)=0, S -> z_eff
    Table1D f_factor;     // (1/A, dimensionless), F(0)=z_eff, non-increasing

    // Cumulative integral of F(q)^2 dq^2 over the f_factor knots; derived at
    // load time, feeds the coherent-angle sampler.
    std::vector<double> f2_q2_cdf;

    bool has_tables() const { return !mu.empty(); }
};

// Parses the plain-text material format: '#' comments, header keys
// name=/z_eff=/density=, then two-column sections [mu], [incoherent],
// [coherent], [photoelectric], [S], [F]. Throws with the offending line
// number on parse errors and with the violated constraint by name on
// invariant violations.
Material load_material(const std::filesystem::path& path);

// Writes the same format; load(save(m)) reproduces all values exactly.
void save_material(const Material& m, const std::filesystem::path& path);

// Validates the cross-table invariants; used by load_material and by tests
// that build materials in memory.
void validate_material(const Material& m);

// Linear attenuation coefficient in 1/cm at the given bulk density.
// Log-log interpolation of the mass attenuation table, exact at knots;
// out-of-range energies throw (no extrapolation).
double mu_at(const Material& m, double energy_kev, double density_g_cm3);

// Incoherent scattering function S(q) and coherent form factor F(q), linear
// interpolation; beyond the last knot S clamps to z_eff and F clamps to its
// last tabulated value. Negative q throws.
double form_factor_S(const Material& m, double q_inv_angstrom);
double form_factor_F(const Material& m, double q_inv_angstrom);

// Integrated cross sections at an energy (barn per formula unit); log-log
// between knots, linear across segments that touch zero.
double sigma_incoh_at(const Material& m, double energy_kev);
double sigma_coh_at(const Material& m, double energy_kev);
double sigma_pe_at(const Material& m, double energy_kev);

} // namespace xscat
