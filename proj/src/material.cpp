#include "xscat/material.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace xscat {

namespace {

std::string strip(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line_no, const std::string& what)
{
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": parse error: " + what);
}

[[noreturn]] void invariant_fail(const std::string& name, const std::string& what)
{
    throw std::runtime_error("material '" + name + "': invariant violation: " + what);
}

void require_increasing(const std::string& name, const std::string& table,
                        const std::vector<double>& x)
{
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            invariant_fail(name, "non-monotone abscissa in [" + table + "]");
}

void require_nonnegative(const std::string& name, const std::string& table,
                         const std::vector<double>& y)
{
    for (double v : y)
        if (!(v >= 0.0) || !std::isfinite(v))
            invariant_fail(name, "negative or non-finite value in [" + table + "]");
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void validate_material(const Material& m)
{
    if (m.name.empty())
        invariant_fail("(unnamed)", "missing name");
    if (!(m.z_eff > 0.0))
        invariant_fail(m.name, "z_eff must be > 0");
    if (!(m.density_ref > 0.0))
        invariant_fail(m.name, "density must be > 0");

    struct Item { const char* tag; const Table1D* t; };
    for (auto [tag, t] : {Item{"mu", &m.mu}, Item{"incoherent", &m.sigma_incoh},
                          Item{"coherent", &m.sigma_coh}, Item{"photoelectric", &m.sigma_pe},
                          Item{"S", &m.s_factor}, Item{"F", &m.f_factor}}) {
        if (t->empty())
            invariant_fail(m.name, std::string("missing table [") + tag + "]");
        require_increasing(m.name, tag, t->xs());
        require_nonnegative(m.name, tag, t->ys());
    }

    for (double v : m.mu.ys())
        if (!(v > 0.0))
            invariant_fail(m.name, "mu values must be > 0");

    const auto& sq = m.s_factor.xs();
    const auto& sv = m.s_factor.ys();
    if (sq.front() != 0.0 || sv.front() != 0.0)
        invariant_fail(m.name, "S table must start at S(0) = 0");
    for (std::size_t i = 1; i < sv.size(); ++i)
        if (sv[i] < sv[i - 1])
            invariant_fail(m.name, "S must be non-decreasing in q");
    if (sv.back() > m.z_eff * (1.0 + 1e-9))
        invariant_fail(m.name, "S must not exceed z_eff");

    const auto& fq = m.f_factor.xs();
    const auto& fv = m.f_factor.ys();
    if (fq.front() != 0.0)
        invariant_fail(m.name, "F table must start at q = 0");
    if (std::abs(fv.front() - m.z_eff) > 1e-9 * m.z_eff)
        invariant_fail(m.name, "F(0) must equal z_eff");
    for (std::size_t i = 1; i < fv.size(); ++i)
        if (fv[i] > fv[i - 1] * (1.0 + 1e-12) + 1e-15)
            invariant_fail(m.name, "F must be non-increasing in q");
}

namespace {

// Exact integral of F(q)^2 dq^2 across each knot interval of the (piecewise
// linear in q) form factor; cumulative values drive the coherent sampler.
std::vector<double> build_f2_q2_cdf(const Table1D& f)
{
    const auto& q = f.xs();
    const auto& fv = f.ys();
    std::vector<double> cdf(q.size(), 0.0);
    for (std::size_t i = 1; i < q.size(); ++i) {
        const double q0 = q[i - 1], q1 = q[i];
        const double a = fv[i - 1];
        const double b = (fv[i] - fv[i - 1]) / (q1 - q0); // F = a + b (q - q0)
        // integral of (a + b (q-q0))^2 * 2 q dq over [q0, q1]
        const double h = q1 - q0;
        const double c0 = a * a, c1 = 2.0 * a * b, c2 = b * b;
        // expand in u = q - q0: (c0 + c1 u + c2 u^2) * 2 (q0 + u)
        const double integral = 2.0 * (c0 * q0 * h + (c0 + c1 * q0) * h * h / 2.0 +
                                       (c1 + c2 * q0) * h * h * h / 3.0 + c2 * h * h * h * h / 4.0);
        cdf[i] = cdf[i - 1] + integral;
    }
    return cdf;
}

} // namespace

Material load_material(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open material file " + path.string());

    Material m;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> tables;
    std::string section;
    std::string line;
    int line_no = 0;
    bool have_name = false, have_z = false, have_density = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = strip(line);
        if (line.empty())
            continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                parse_fail(path, line_no, "malformed section header");
            section = strip(line.substr(1, line.size() - 2));
            static const char* known[] = {"mu", "incoherent", "coherent", "photoelectric", "S", "F"};
            bool ok = false;
            for (auto* k : known)
                ok = ok || section == k;
            if (!ok)
                parse_fail(path, line_no, "unknown section [" + section + "]");
            continue;
        }

        if (section.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                parse_fail(path, line_no, "expected key=value before first section");
            const std::string key = strip(line.substr(0, eq));
            const std::string value = strip(line.substr(eq + 1));
            try {
                if (key == "name") {
                    m.name = value;
                    have_name = true;
                } else if (key == "z_eff") {
                    m.z_eff = std::stod(value);
                    have_z = true;
                } else if (key == "density") {
                    m.density_ref = std::stod(value);
                    have_density = true;
                } else {
                    parse_fail(path, line_no, "unknown header key '" + key + "'");
                }
            } catch (const std::invalid_argument&) {
                parse_fail(path, line_no, "cannot parse number '" + value + "'");
            }
            continue;
        }

        std::istringstream row(line);
        double x = 0.0, y = 0.0;
        if (!(row >> x >> y))
            parse_fail(path, line_no, "expected two numeric columns");
        std::string extra;
        if (row >> extra)
            parse_fail(path, line_no, "trailing token '" + extra + "'");
        tables[section].first.push_back(x);
        tables[section].second.push_back(y);
    }

    if (!have_name || !have_z || !have_density)
        parse_fail(path, line_no, "missing header key (name=, z_eff=, density=)");

    auto take = [&](const char* tag) -> Table1D {
        auto it = tables.find(tag);
        if (it == tables.end() || it->second.first.empty())
            invariant_fail(m.name, std::string("missing table [") + tag + "]");
        // Abscissa monotonicity is re-checked here so the error carries the
        // constraint name rather than Table1D's generic message.
        require_increasing(m.name, tag, it->second.first);
        return Table1D(std::move(it->second.first), std::move(it->second.second),
                       m.name + "." + tag);
    };

    m.mu = take("mu");
    m.sigma_incoh = take("incoherent");
    m.sigma_coh = take("coherent");
    m.sigma_pe = take("photoelectric");
    m.s_factor = take("S");
    m.f_factor = take("F");

    validate_material(m);
    m.f2_q2_cdf = build_f2_q2_cdf(m.f_factor);
    return m;
}

void save_material(const Material& m, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write material file " + path.string());
    out << "name = " << m.name << "\n";
    out << "z_eff = " << fmt(m.z_eff) << "\n";
    out << "density = " << fmt(m.density_ref) << "\n";
    auto dump = [&](const char* tag, const Table1D& t) {
        out << "[" << tag << "]\n";
        for (std::size_t i = 0; i < t.size(); ++i)
            out << fmt(t.xs()[i]) << " " << fmt(t.ys()[i]) << "\n";
    };
    dump("mu", m.mu);
    dump("incoherent", m.sigma_incoh);
    dump("coherent", m.sigma_coh);
    dump("photoelectric", m.sigma_pe);
    dump("S", m.s_factor);
    dump("F", m.f_factor);
}

double mu_at(const Material& m, double energy_kev, double density_g_cm3)
{
    if (!(density_g_cm3 >= 0.0))
        throw std::invalid_argument("mu_at: negative density");
    return m.mu.loglog(energy_kev) * density_g_cm3;
}

double form_factor_S(const Material& m, double q_inv_angstrom)
{
    if (!(q_inv_angstrom >= 0.0))
        throw std::domain_error("form_factor_S: negative q");
    if (q_inv_angstrom >= m.s_factor.x_back())
        return m.z_eff; // documented clamp: bound electrons all act free
    return m.s_factor.linear(q_inv_angstrom);
}

double form_factor_F(const Material& m, double q_inv_angstrom)
{
    if (!(q_inv_angstrom >= 0.0))
        throw std::domain_error("form_factor_F: negative q");
    return m.f_factor.linear_clamped(q_inv_angstrom);
}

double sigma_incoh_at(const Material& m, double energy_kev) { return m.sigma_incoh.loglog(energy_kev); }
double sigma_coh_at(const Material& m, double energy_kev) { return m.sigma_coh.loglog(energy_kev); }
double sigma_pe_at(const Material& m, double energy_kev) { return m.sigma_pe.loglog(energy_kev); }

} // namespace xscat
