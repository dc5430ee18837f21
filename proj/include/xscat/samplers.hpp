#pragma once
#include "xscat/material.hpp"
#include "xscat/rng.hpp"
#include "xscat/vec3.hpp"

namespace xscat {

struct ComptonSample {
    double theta = 0.0;       // polar scatter angle, radians
    double alpha_prime = 0.0; // outgoing energy in units of mec^2
    double phi = 0.0;         // azimuth in [0, 2pi)
};

// Samples the incoherent scatter angle from the S(q)-modified Klein-Nishina
// distribution: Kahn's rejection method for the Klein-Nishina core, thinned
// by S(q)/S(q_max). alpha_prime satisfies the Compton relation exactly.
ComptonSample sample_compton(const Material& m, double energy_kev, CounterRng& rng);

struct RayleighSample {
    double theta = 0.0;
    double phi = 0.0;
};

// Samples the coherent scatter angle from (1 + cos^2 theta) F(q)^2 sin theta:
// q^2 is drawn by exact inversion of the tabulated integral of F^2 dq^2
// (restricted to the kinematic range q <= q_max(E)), then thinned by the
// Thomson factor (1 + cos^2)/2. Energy is unchanged by coherent scattering.
RayleighSample sample_rayleigh(const Material& m, double energy_kev, CounterRng& rng);

// Exposed for tests: Kahn's Klein-Nishina sampler for the bare (S = const)
// distribution; returns cos(theta).
double kahn_sample_cos_theta(double alpha, CounterRng& rng);

// Rotates `dir` by polar angle theta about itself with azimuth phi, using a
// deterministic orthonormal frame.
Vec3 rotate_direction(const Vec3& dir, double theta, double phi);

} // namespace xscat
