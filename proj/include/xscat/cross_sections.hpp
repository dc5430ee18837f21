#pragma once
#include "xscat/material.hpp"
#include "xscat/rng.hpp"

namespace xscat {

enum class Interaction { photoelectric, compton, rayleigh };

// Momentum transfer in 1/Angstrom for a photon of energy E scattering by
// theta: q = sin(theta/2) / lambda with lambda = hc / E.
double momentum_transfer(double energy_kev, double theta);

// Outgoing/incident energy ratio for Compton scattering by theta,
// alpha' / alpha = 1 / (1 + alpha (1 - cos theta)).
double compton_energy_ratio(double energy_kev, double theta);

// Differential cross sections per formula unit, cm^2/sr.
// Incoherent: (r0^2/2) (a'/a)^2 (a'/a + a/a' - sin^2 theta) S(q).
// Coherent:   (r0^2/2) (1 + cos^2 theta) F(q)^2.
double d_sigma_compton(const Material& m, double energy_kev, double theta);
double d_sigma_rayleigh(const Material& m, double energy_kev, double theta);

// Scatter probability density toward a direction at angle theta, normalized
// by the integrated cross section: p / (2 pi) is the probability per
// steradian. Throws when the integrated cross section vanishes at E.
double p_lambda_compton(const Material& m, double energy_kev, double theta);
double p_lambda_rayleigh(const Material& m, double energy_kev, double theta);

// Branches proportionally to the three tabulated cross sections at E.
// Throws when all three vanish (non-physical table).
Interaction select_interaction(const Material& m, double energy_kev, CounterRng& rng);

} // namespace xscat
