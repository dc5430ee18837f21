#pragma once
#include <filesystem>

#include "xscat/material.hpp"
#include "xscat/table.hpp"

namespace xscat {

// Detector efficiency model: absorption probability (DQE) and mean deposited
// energy per *incident* photon. For an energy-integrating detector the scored
// response factor is deposit(E)/E, which reduces to the DQE under the
// analytic single-layer model below.
struct DetectorResponse {
    Table1D dqe;     // (keV, probability in [0,1])
    Table1D deposit; // (keV, keV)

    double dqe_at(double energy_kev) const { return dqe.linear(energy_kev); }
    double deposit_at(double energy_kev) const { return deposit.linear(energy_kev); }

    // Dimensionless signal per incident photon, normalized by its energy.
    double response_factor(double energy_kev) const
    {
        return deposit.linear(energy_kev) / energy_kev;
    }
};

// Single-layer scintillator absorption model on the scintillator material's
// tabulated energy grid: dqe(E) = 1 - exp(-mu(E) * thickness) at the
// material's reference density, deposit(E) = E * dqe(E).
DetectorResponse analytic_detector_response(const Material& scintillator, double thickness_cm);

// Three-column CSV (keV, dqe, deposit_keV).
DetectorResponse load_detector_response(const std::filesystem::path& path);
void save_detector_response(const DetectorResponse& r, const std::filesystem::path& path);
void validate_detector_response(const DetectorResponse& r);

} // namespace xscat
