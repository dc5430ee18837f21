#pragma once

namespace xscat {

// Fixed physics constants used throughout the photon model.
namespace constants {

// Classical electron radius in cm (CODATA).
inline constexpr double r0_cm = 2.8179403e-13;

// Electron rest energy in keV.
inline constexpr double mec2_kev = 511.0;

// hc in keV*Angstrom; photon wavelength [A] = hc / E[keV].
inline constexpr double hc_kev_angstrom = 12.398;

// barn in cm^2.
inline constexpr double barn_cm2 = 1.0e-24;

inline constexpr double avogadro = 6.02214076e23;

inline constexpr double pi = 3.14159265358979323846;

} // namespace constants

} // namespace xscat
