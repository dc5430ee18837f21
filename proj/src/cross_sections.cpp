#include "xscat/cross_sections.hpp"

#include <cmath>
#include <stdexcept>

#include "xscat/constants.hpp"

namespace xscat {

namespace {

void check_theta(double theta)
{
    if (!(theta >= 0.0 && theta <= constants::pi))
        throw std::domain_error("scatter angle outside [0, pi]");
}

// Klein-Nishina angular core (a'/a)^2 (a'/a + a/a' - sin^2 theta).
double kn_core(double energy_kev, double theta)
{
    const double ratio = compton_energy_ratio(energy_kev, theta);
    const double s = std::sin(theta);
    return ratio * ratio * (ratio + 1.0 / ratio - s * s);
}

} // namespace

double momentum_transfer(double energy_kev, double theta)
{
    return std::sin(0.5 * theta) * energy_kev / constants::hc_kev_angstrom;
}

double compton_energy_ratio(double energy_kev, double theta)
{
    const double alpha = energy_kev / constants::mec2_kev;
    return 1.0 / (1.0 + alpha * (1.0 - std::cos(theta)));
}

double d_sigma_compton(const Material& m, double energy_kev, double theta)
{
    check_theta(theta);
    const double r0 = constants::r0_cm;
    return 0.5 * r0 * r0 * kn_core(energy_kev, theta) *
           form_factor_S(m, momentum_transfer(energy_kev, theta));
}

double d_sigma_rayleigh(const Material& m, double energy_kev, double theta)
{
    check_theta(theta);
    const double r0 = constants::r0_cm;
    const double c = std::cos(theta);
    const double f = form_factor_F(m, momentum_transfer(energy_kev, theta));
    return 0.5 * r0 * r0 * (1.0 + c * c) * f * f;
}

double p_lambda_compton(const Material& m, double energy_kev, double theta)
{
    check_theta(theta);
    const double sigma = sigma_incoh_at(m, energy_kev) * constants::barn_cm2;
    if (!(sigma > 0.0))
        throw std::runtime_error("p_lambda_compton: vanishing incoherent cross section at " +
                                 std::to_string(energy_kev) + " keV");
    const double r0 = constants::r0_cm;
    return constants::pi * r0 * r0 / sigma * kn_core(energy_kev, theta) *
           form_factor_S(m, momentum_transfer(energy_kev, theta));
}

double p_lambda_rayleigh(const Material& m, double energy_kev, double theta)
{
    check_theta(theta);
    const double sigma = sigma_coh_at(m, energy_kev) * constants::barn_cm2;
    if (!(sigma > 0.0))
        throw std::runtime_error("p_lambda_rayleigh: vanishing coherent cross section at " +
                                 std::to_string(energy_kev) + " keV");
    const double r0 = constants::r0_cm;
    const double c = std::cos(theta);
    const double f = form_factor_F(m, momentum_transfer(energy_kev, theta));
    return constants::pi * r0 * r0 / sigma * (1.0 + c * c) * f * f;
}

Interaction select_interaction(const Material& m, double energy_kev, CounterRng& rng)
{
    const double pe = sigma_pe_at(m, energy_kev);
    const double incoh = sigma_incoh_at(m, energy_kev);
    const double coh = sigma_coh_at(m, energy_kev);
    const double total = pe + incoh + coh;
    if (!(total > 0.0))
        throw std::runtime_error("select_interaction: all cross sections vanish at " +
                                 std::to_string(energy_kev) + " keV in " + m.name);
    const double u = rng.uniform() * total;
    if (u < pe)
        return Interaction::photoelectric;
    if (u < pe + incoh)
        return Interaction::compton;
    return Interaction::rayleigh;
}

} // namespace xscat
