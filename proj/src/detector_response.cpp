#include "xscat/detector_response.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xscat {

void validate_detector_response(const DetectorResponse& r)
{
    if (r.dqe.empty() || r.deposit.empty())
        throw std::runtime_error("detector response: empty table");
    for (double v : r.dqe.ys())
        if (!(v >= 0.0 && v <= 1.0))
            throw std::runtime_error("detector response: dqe outside [0,1]");
    for (std::size_t i = 0; i < r.deposit.size(); ++i)
        if (r.deposit.ys()[i] > r.deposit.xs()[i] * (1.0 + 1e-12))
            throw std::runtime_error("detector response: deposit exceeds incident energy");
}

DetectorResponse analytic_detector_response(const Material& scintillator, double thickness_cm)
{
    if (!(thickness_cm > 0.0))
        throw std::invalid_argument("analytic_detector_response: thickness must be > 0");
    if (scintillator.mu.empty())
        throw std::runtime_error("analytic_detector_response: scintillator has no mu table");

    const auto& energies = scintillator.mu.xs();
    std::vector<double> dqe(energies.size()), dep(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) {
        const double mu_lin = mu_at(scintillator, energies[i], scintillator.density_ref);
        dqe[i] = 1.0 - std::exp(-mu_lin * thickness_cm);
        dep[i] = energies[i] * dqe[i];
    }
    DetectorResponse r{Table1D(energies, std::move(dqe), "dqe"),
                       Table1D(energies, std::move(dep), "deposit")};
    validate_detector_response(r);
    return r;
}

DetectorResponse load_detector_response(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open detector response file " + path.string());
    std::vector<double> e, dqe, dep;
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
        double a = 0.0, b = 0.0, c = 0.0;
        if (!(row >> a))
            continue;
        if (!(row >> b >> c))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected three columns (keV, dqe, deposit_keV)");
        e.push_back(a);
        dqe.push_back(b);
        dep.push_back(c);
    }
    if (e.empty())
        throw std::runtime_error(path.string() + ": empty detector response");
    DetectorResponse r{Table1D(e, std::move(dqe), "dqe"), Table1D(e, std::move(dep), "deposit")};
    validate_detector_response(r);
    return r;
}

void save_detector_response(const DetectorResponse& r, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write detector response file " + path.string());
    out << "# keV, dqe, deposit_keV\n";
    char buf[120];
    for (std::size_t i = 0; i < r.dqe.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g, %.17g, %.17g\n", r.dqe.xs()[i], r.dqe.ys()[i],
                      r.deposit.ys()[i]);
        out << buf;
    }
}

} // namespace xscat
