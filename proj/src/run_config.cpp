#include "xscat/run_config.hpp"

#include <cctype>
#include <fstream>
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

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = strip(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

class KeyReader {
public:
    KeyReader(const IniData& ini, std::vector<std::string>& errors) : ini_(ini), errors_(errors) {}

    std::string str(const std::string& section, const std::string& key,
                    const std::string& fallback = {}, bool required = false)
    {
        const auto sec = ini_.find(section);
        if (sec != ini_.end()) {
            const auto it = sec->second.find(key);
            if (it != sec->second.end())
                return strip(it->second);
        }
        if (required)
            errors_.push_back("missing required key [" + section + "] " + key);
        return fallback;
    }

    double num(const std::string& section, const std::string& key, double fallback,
               bool required = false)
    {
        const std::string v = str(section, key, "", required);
        if (v.empty())
            return fallback;
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size())
                throw std::invalid_argument(v);
            return x;
        } catch (...) {
            errors_.push_back("[" + section + "] " + key + ": cannot parse number '" + v + "'");
            return fallback;
        }
    }

    long long integer(const std::string& section, const std::string& key, long long fallback,
                      bool required = false)
    {
        const double x = num(section, key, static_cast<double>(fallback), required);
        return static_cast<long long>(x);
    }

private:
    const IniData& ini_;
    std::vector<std::string>& errors_;
};

} // namespace

IniData parse_ini(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path.string());
    IniData data;
    std::string section = "";
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = strip(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": malformed section header");
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        data[section][strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return data;
}

RunConfig build_run_config(const IniData& ini, const std::filesystem::path& base_dir,
                           std::vector<std::string>& errors)
{
    KeyReader r(ini, errors);
    RunConfig cfg;

    auto resolve = [&](const std::string& p) -> std::filesystem::path {
        if (p.empty())
            return {};
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    cfg.materials_dir = resolve(r.str("paths", "materials_dir", "", true));
    cfg.material_files = split_list(r.str("paths", "materials", "", true));
    cfg.spectrum_file = resolve(r.str("paths", "spectrum", "", true));
    cfg.detector_response_file = resolve(r.str("paths", "detector_response", "", true));
    cfg.phantom_file = resolve(r.str("paths", "phantom", "", true));
    cfg.output_dir = resolve(r.str("paths", "output_dir", "."));

    cfg.sdd_cm = r.num("geometry", "sdd_cm", 0.0, true);
    cfg.sod_cm = r.num("geometry", "sod_cm", 0.0, true);
    cfg.det_nu = static_cast<int>(r.integer("geometry", "det_nu", 0, true));
    cfg.det_nv = static_cast<int>(r.integer("geometry", "det_nv", 0, true));
    cfg.pixel_pitch_cm = r.num("geometry", "pixel_pitch_cm", 0.0, true);
    cfg.n_angles = static_cast<int>(r.integer("geometry", "n_angles", 0, true));

    cfg.sim.photons_total = static_cast<std::uint64_t>(r.integer("sim", "photons_total", 10000));
    cfg.sim.splitting = static_cast<int>(r.integer("sim", "splitting", 1));
    cfg.sim.roulette_survival = r.num("sim", "roulette_survival", 0.5);
    cfg.sim.roulette_wmin_rel = r.num("sim", "roulette_wmin_rel", 1e-3);
    cfg.sim.step_voxels = static_cast<int>(r.integer("sim", "step_voxels", 1));
    cfg.sim.max_interactions = static_cast<int>(r.integer("sim", "max_interactions", 50));
    cfg.sim.seed = static_cast<std::uint64_t>(r.integer("sim", "seed", 0));

    cfg.correction.n_iterations = static_cast<int>(r.integer("correction", "n_iterations", 3));
    cfg.correction.simulate_every_kth_angle =
        static_cast<int>(r.integer("correction", "simulate_every_kth_angle", 2));
    cfg.correction.mc_nu = static_cast<int>(r.integer("correction", "mc_nu", 0));
    cfg.correction.mc_nv = static_cast<int>(r.integer("correction", "mc_nv", 0));
    const int rd = static_cast<int>(r.integer("correction", "recon_dim", 64));
    cfg.correction.recon_dims = {rd, rd, rd};
    cfg.correction.n_classes = static_cast<int>(r.integer("correction", "n_classes", 3));
    cfg.class_map_spec = split_list(r.str("correction", "class_map", ""));
    cfg.correction.sg.window = static_cast<int>(r.integer("correction", "sg_window", 15));
    cfg.correction.sg.polyorder = static_cast<int>(r.integer("correction", "sg_polyorder", 3));
    cfg.correction.sg_auto_window = r.integer("correction", "sg_auto_window", 1) != 0;

    cfg.threads = static_cast<int>(r.integer("run", "threads", 1));
    cfg.correction.workers = cfg.threads;
    cfg.correction.sim = cfg.sim;
    return cfg;
}

void validate_run_config(const RunConfig& cfg, std::vector<std::string>& errors)
{
    namespace fs = std::filesystem;
    auto check_file = [&](const fs::path& p, const std::string& what) {
        if (p.empty())
            return; // reported as a missing key already
        if (!fs::exists(p))
            errors.push_back(what + " does not exist: " + p.string());
    };
    if (!cfg.materials_dir.empty() && !fs::is_directory(cfg.materials_dir))
        errors.push_back("materials_dir is not a directory: " + cfg.materials_dir.string());
    if (cfg.material_files.empty())
        errors.push_back("no material files listed");
    for (const auto& f : cfg.material_files)
        check_file(cfg.materials_dir / f, "material file");
    check_file(cfg.spectrum_file, "spectrum file");
    check_file(cfg.detector_response_file, "detector response file");
    check_file(cfg.phantom_file, "phantom file");

    if (!(cfg.sod_cm > 0.0) || !(cfg.sdd_cm > cfg.sod_cm))
        errors.push_back("geometry: require 0 < sod_cm < sdd_cm");
    if (cfg.det_nu <= 0 || cfg.det_nv <= 0)
        errors.push_back("geometry: det_nu/det_nv must be positive");
    if (!(cfg.pixel_pitch_cm > 0.0))
        errors.push_back("geometry: pixel_pitch_cm must be positive");
    if (cfg.n_angles < 1)
        errors.push_back("geometry: n_angles must be >= 1");

    if (cfg.sim.photons_total < 1)
        errors.push_back("sim: photons_total must be >= 1");
    if (cfg.sim.splitting < 1)
        errors.push_back("sim: splitting must be >= 1");
    if (!(cfg.sim.roulette_survival > 0.0 && cfg.sim.roulette_survival <= 1.0))
        errors.push_back("sim: roulette_survival must lie in (0,1]");
    if (cfg.sim.step_voxels < 1)
        errors.push_back("sim: step_voxels must be >= 1");
    if (cfg.sim.max_interactions < 1)
        errors.push_back("sim: max_interactions must be >= 1");

    if (cfg.correction.n_iterations < 1)
        errors.push_back("correction: n_iterations must be >= 1");
    if (cfg.correction.simulate_every_kth_angle < 1)
        errors.push_back("correction: simulate_every_kth_angle must be >= 1");
    if (cfg.correction.n_classes < 2 || cfg.correction.n_classes > 4)
        errors.push_back("correction: n_classes must be in [2,4]");
    if (!cfg.class_map_spec.empty() &&
        static_cast<int>(cfg.class_map_spec.size()) != cfg.correction.n_classes)
        errors.push_back("correction: class_map must list exactly n_classes entries");
    for (const auto& entry : cfg.class_map_spec)
        if (entry.find(':') == std::string::npos)
            errors.push_back("correction: class_map entry '" + entry +
                             "' must be material:density");
    if (cfg.threads < 1)
        errors.push_back("run: threads must be >= 1");
}

LoadedInputs load_inputs(RunConfig& cfg)
{
    LoadedInputs in;
    in.materials.push_back(vacuum_material());
    for (const auto& f : cfg.material_files)
        in.materials.push_back(load_material(cfg.materials_dir / f));
    in.spectrum = load_spectrum(cfg.spectrum_file);
    in.response = load_detector_response(cfg.detector_response_file);
    {
        // load_phantom consumes the material list
        std::vector<Material> mats = in.materials;
        in.phantom = load_phantom(cfg.phantom_file, std::move(mats));
    }
    in.geometry = make_circular_geometry(cfg.sdd_cm, cfg.sod_cm, cfg.det_nu, cfg.det_nv,
                                         cfg.pixel_pitch_cm, cfg.n_angles);

    cfg.correction.class_map.clear();
    for (const auto& entry : cfg.class_map_spec) {
        const auto colon = entry.find(':');
        const std::string name = entry.substr(0, colon);
        const double density = std::stod(entry.substr(colon + 1));
        ClassSpec spec;
        if (name == "air" || name == "vacuum") {
            spec.material_id = 0;
            spec.density = 0.0;
        } else {
            int id = -1;
            for (std::size_t i = 1; i < in.materials.size(); ++i)
                if (in.materials[i].name == name)
                    id = static_cast<int>(i);
            if (id < 0)
                throw std::runtime_error("class_map references unknown material '" + name + "'");
            spec.material_id = id;
            spec.density = density;
        }
        cfg.correction.class_map.push_back(spec);
    }
    return in;
}

} // namespace xscat
