// xscat: Monte Carlo X-ray scatter simulation and iterative scatter
// correction for circular cone-beam CT, driven by a declarative config file.
//
// Exit codes: 0 ok, 2 validation error, 3 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "xscat/correction.hpp"
#include "xscat/metrics.hpp"
#include "xscat/run_config.hpp"
#include "xscat/synthetic.hpp"
#include "xscat/trace.hpp"
#include "xscat/volume.hpp"

using namespace xscat;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

RunConfig load_config_or_die(const CommonFlags& flags)
{
    const fs::path path = flags.config_path;
    IniData ini = parse_ini(path);
    std::vector<std::string> errors;
    RunConfig cfg = build_run_config(ini, path.parent_path(), errors);
    if (flags.seed) {
        cfg.sim.seed = *flags.seed;
        cfg.correction.sim.seed = *flags.seed;
    }
    if (flags.threads) {
        cfg.threads = *flags.threads;
        cfg.correction.workers = *flags.threads;
    }
    validate_run_config(cfg, errors);
    if (!errors.empty()) {
        std::cerr << "config validation failed (" << errors.size() << " problems):\n";
        for (const auto& e : errors)
            std::cerr << "  - " << e << "\n";
        std::exit(kExitValidation);
    }
    return cfg;
}

std::vector<int> parse_angle_list(const std::string& text, int n_angles, bool given)
{
    std::vector<int> out;
    if (!given) { // flag omitted: all angles
        for (int i = 0; i < n_angles; ++i)
            out.push_back(i);
        return out;
    }
    // "a:b" range (half-open) or comma list
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        const int a = std::stoi(text.substr(0, colon));
        const int b = std::stoi(text.substr(colon + 1));
        for (int i = a; i < b; ++i)
            out.push_back(i);
        return out;
    }
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(std::stoi(item));
    return out;
}

int cmd_simulate(const CommonFlags& flags, const std::string& what, const std::string& angles,
                 bool angles_given)
{
    RunConfig cfg = load_config_or_die(flags);
    LoadedInputs in = load_inputs(cfg);
    std::printf("effective seed: %llu\n", static_cast<unsigned long long>(cfg.sim.seed));

    ScanQuantity q = ScanQuantity::both;
    if (what == "primary")
        q = ScanQuantity::primary;
    else if (what == "scatter")
        q = ScanQuantity::scatter;
    else if (what != "both") {
        std::cerr << "--what must be primary|scatter|both\n";
        return kExitValidation;
    }
    const std::vector<int> subset = parse_angle_list(angles, in.geometry.n_angles(), angles_given);
    if (subset.empty()) {
        std::cerr << "usage error: empty angle list\n";
        return kExitValidation;
    }
    for (int idx : subset)
        if (idx < 0 || idx >= in.geometry.n_angles()) {
            std::cerr << "angle index " << idx << " out of range\n";
            return kExitValidation;
        }

    fs::create_directories(cfg.output_dir);
    const ScanResult result =
        run_scan(in.phantom, in.geometry, in.spectrum, in.response, cfg.sim, subset, q,
                 cfg.threads);
    if (q != ScanQuantity::scatter)
        save_stack(result.primary, cfg.output_dir / "primary.xprj");
    if (q != ScanQuantity::primary)
        save_stack(result.scatter, cfg.output_dir / "scatter.xprj");

    std::ofstream timing(cfg.output_dir / "timing.csv");
    timing << "angle_idx,seconds\n";
    double total = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        timing << subset[i] << "," << result.seconds_per_angle[i] << "\n";
        total += result.seconds_per_angle[i];
    }
    timing << "total," << total << "\n";
    std::printf("simulated %zu angles in %.2f s (%.3f s/projection)\n", subset.size(), total,
                total / subset.size());
    return 0;
}

int cmd_reconstruct(const CommonFlags& flags, const std::string& stack_path,
                    const std::string& flat_path, const std::string& out_path, int dim)
{
    RunConfig cfg = load_config_or_die(flags);
    LoadedInputs in = load_inputs(cfg);

    ProjectionStack stack = load_stack(stack_path, in.geometry.angles);
    if (!flat_path.empty()) {
        const ProjectionStack flat_stack = load_stack(flat_path);
        stack = intensity_to_attenuation(stack, flat_stack.images.at(0));
    }
    const std::array<int, 3> dims{dim, dim, dim};
    const Volume vol = fbp_reconstruct(stack, in.geometry, dims,
                                       default_voxel_size(in.geometry, dims), RampWindow::hann,
                                       cfg.threads);
    save_volume(vol, out_path);
    std::printf("wrote %s (%dx%dx%d)\n", out_path.c_str(), dim, dim, dim);
    return 0;
}

int cmd_correct(const CommonFlags& flags, const std::string& raw_path,
                const std::string& flat_path)
{
    RunConfig cfg = load_config_or_die(flags);
    LoadedInputs in = load_inputs(cfg);
    std::printf("effective seed: %llu\n",
                static_cast<unsigned long long>(cfg.correction.sim.seed));

    const ProjectionStack raw = load_stack(raw_path, in.geometry.angles);
    const ProjectionStack flat_stack = load_stack(flat_path);

    fs::create_directories(cfg.output_dir);
    const CorrectionResult result =
        run_iterative_correction(raw, flat_stack.images.at(0), in.geometry, in.spectrum,
                                 in.response, cfg.correction, in.materials);
    save_volume(result.corrected_volume, cfg.output_dir / "corrected.xvol");
    save_stack(result.corrected_stack, cfg.output_dir / "corrected.xprj");
    write_reports(result.reports, cfg.output_dir / "iterations.txt");
    write_summary_csv(result.reports, cfg.correction.sim, cfg.output_dir / "summary.csv");
    for (const auto& r : result.reports)
        std::printf("iteration %d: %.1f s total, %.3f s/projection MC, scatter fraction %.3f, "
                    "NCC %.5f\n",
                    r.iteration, r.seconds_total, r.mc_seconds_per_projection,
                    r.mean_scatter_fraction, r.ncc_to_previous);
    return 0;
}

int cmd_phantom(const std::string& kind, const std::string& out_path, int dim, double voxel_cm,
                const std::string& materials_dir, double radius_cm, double height_cm,
                int n_rods)
{
    const fs::path mats = materials_dir;
    auto mat = [&](const char* f) { return load_material(mats / f); };

    VoxelPhantom ph;
    if (kind == "empty") {
        // vacuum-only grid: simulate --what primary on it yields the flat field
        ph = make_empty_phantom(dim, dim, dim, {voxel_cm, voxel_cm, voxel_cm},
                                {mat("water.mat")});
    } else if (kind == "cube") {
        ph = make_cube_phantom(dim, voxel_cm, radius_cm > 0 ? 2.0 * radius_cm : dim * voxel_cm * 0.5,
                               mat("water.mat"), 1.0);
    } else if (kind == "cylinder") {
        const Material water = mat("water.mat");
        ph = make_cylinder_phantom(dim, voxel_cm, radius_cm, height_cm, water, 1.0);
    } else if (kind == "rods") {
        const Material body = mat("cement.mat");
        const Material rod = mat("iron.mat");
        ph = make_rods_phantom(dim, voxel_cm, radius_cm, height_cm, body, body.density_ref,
                               n_rods, radius_cm * 0.08, radius_cm * 0.6, rod, rod.density_ref);
    } else if (kind == "cylinder-head-like") {
        const Material body = mat("aluminum.mat");
        const Material insert = mat("iron.mat");
        ph = make_cylinder_head_phantom(dim, voxel_cm, body, body.density_ref, insert,
                                        insert.density_ref);
    } else {
        std::cerr << "unknown phantom kind '" << kind
                  << "' (empty|cube|cylinder|rods|cylinder-head-like)\n";
        return kExitValidation;
    }
    save_phantom(ph, out_path);
    std::printf("wrote %s (%d^3 voxels of %.3f cm)\n", out_path.c_str(), dim, voxel_cm);
    return 0;
}

int cmd_metrics(const std::string& a_path, const std::string& b_path, const std::string& roi,
                int slice, const std::string& out_csv, const std::string& profile_spec,
                const std::string& profile_out)
{
    auto load_image = [&](const std::string& p, int slice_idx) -> DetectorImage {
        if (p.ends_with(".xvol")) {
            const Volume v = load_volume(p);
            return volume_slice_z(v, slice_idx < 0 ? v.dims[2] / 2 : slice_idx);
        }
        const ProjectionStack s = load_stack(p);
        return s.images.at(slice_idx < 0 ? 0 : slice_idx);
    };
    const DetectorImage a = load_image(a_path, slice);

    std::ostringstream csv;
    csv << "metric,value\n";
    if (!b_path.empty()) {
        const DetectorImage b = load_image(b_path, slice);
        csv << "mse," << mse(a, b) << "\n";
        csv << "ncc," << ncc(a, b) << "\n";
    }
    if (!roi.empty()) {
        RoiSpec spec;
        if (std::sscanf(roi.c_str(), "%d,%d,%d,%d,%d,%d,%d,%d", &spec.roi_row, &spec.roi_col,
                        &spec.roi_h, &spec.roi_w, &spec.bg_row, &spec.bg_col, &spec.bg_h,
                        &spec.bg_w) != 8) {
            std::cerr << "--roi wants roi_row,roi_col,h,w,bg_row,bg_col,h,w\n";
            return kExitValidation;
        }
        csv << "cnr," << cnr(a, spec) << "\n";
    }
    if (!profile_spec.empty()) {
        // row band averaged into one line per column, for plotting
        int r0 = 0, r1 = 0, c0 = 0, c1 = a.nu;
        const int n = std::sscanf(profile_spec.c_str(), "%d,%d,%d,%d", &r0, &r1, &c0, &c1);
        if (n != 2 && n != 4) {
            std::cerr << "--profile wants row0,row1[,col0,col1]\n";
            return kExitValidation;
        }
        if (n == 2) {
            c0 = 0;
            c1 = a.nu;
        }
        const std::vector<double> line = profile_line(a, r0, r1, c0, c1);
        std::ofstream out(profile_out.empty() ? "profile.csv" : profile_out);
        out << "column,value\n";
        for (std::size_t i = 0; i < line.size(); ++i)
            out << (c0 + static_cast<int>(i)) << "," << line[i] << "\n";
    }
    if (out_csv.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_csv);
        out << csv.str();
    }
    return 0;
}

int cmd_inspect(const std::string& path, int slice, const std::string& pgm_out)
{
    if (path.ends_with(".xvox")) {
        const PhantomHeader h = load_phantom_header(path);
        std::printf("XVOX1 phantom: dims %d x %d x %d, voxel %.4f x %.4f x %.4f cm, "
                    "origin (%.3f, %.3f, %.3f), %u materials\n",
                    h.dims[0], h.dims[1], h.dims[2], h.voxel_size.x, h.voxel_size.y,
                    h.voxel_size.z, h.origin.x, h.origin.y, h.origin.z, h.material_count);
    } else if (path.ends_with(".xprj")) {
        const ProjectionStack s = load_stack(path);
        std::printf("XPRJ1 stack: %d x %d pixels, %d angles\n", s.nu, s.nv, s.n_angles());
    } else if (path.ends_with(".xvol")) {
        const Volume v = load_volume(path);
        std::printf("XVOL1 volume: dims %d x %d x %d, voxel %.4f x %.4f x %.4f cm\n", v.dims[0],
                    v.dims[1], v.dims[2], v.voxel_size.x, v.voxel_size.y, v.voxel_size.z);
        if (!pgm_out.empty()) {
            const int iz = slice < 0 ? v.dims[2] / 2 : slice;
            if (pgm_out.ends_with(".csv"))
                save_slice_csv(v, iz, pgm_out);
            else
                save_slice_pgm(v, iz, pgm_out);
            std::printf("wrote slice %d to %s\n", iz, pgm_out.c_str());
        }
    } else {
        std::cerr << "unknown file type (expected .xvox/.xprj/.xvol)\n";
        return kExitValidation;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo X-ray scatter simulation and cone-beam CT scatter correction"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string what = "both", angles, stack_path, flat_path, out_path, kind, roi_spec;
    std::string a_path, b_path, pgm_out, materials_dir = "data/materials";
    int dim = 64, slice = -1, n_rods = 8;
    double voxel_cm = 0.2, radius_cm = 4.0, height_cm = 10.0;

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        cmd->add_option("--config", flags.config_path, "run configuration file")
            ->required(needs_config);
        cmd->add_option("--seed", flags.seed, "override [sim] seed");
        cmd->add_option("--threads", flags.threads, "override worker count");
    };

    auto* sim = app.add_subcommand("simulate", "simulate primary/scatter projections");
    add_common(sim);
    sim->add_option("--what", what, "primary|scatter|both");
    sim->add_option("--angles", angles, "angle subset, 'a:b' or comma list (default: all)");

    auto* rec = app.add_subcommand("reconstruct", "FDK reconstruction of a projection stack");
    add_common(rec);
    rec->add_option("--stack", stack_path, "attenuation (or intensity) stack")->required();
    rec->add_option("--flat", flat_path, "flatfield stack; converts intensities first");
    rec->add_option("--out", out_path, "output volume")->required();
    rec->add_option("--dim", dim, "cubic output dimension");

    auto* cor = app.add_subcommand("correct", "iterative scatter correction");
    add_common(cor);
    cor->add_option("--raw", stack_path, "raw intensity stack from the scanner")->required();
    cor->add_option("--flat", flat_path, "flatfield stack")->required();

    // --seed/--threads are accepted on every subcommand for uniformity; the
    // deterministic single-pass commands simply ignore them
    auto* pha = app.add_subcommand("phantom", "generate a synthetic voxel phantom");
    pha->add_option("--seed", flags.seed, "unused (deterministic command)");
    pha->add_option("--threads", flags.threads, "unused (single-pass command)");
    pha->add_option("--kind", kind, "empty|cube|cylinder|rods|cylinder-head-like")->required();
    pha->add_option("--out", out_path, "output .xvox file")->required();
    pha->add_option("--dim", dim, "cubic grid dimension");
    pha->add_option("--voxel-cm", voxel_cm, "voxel edge, cm");
    pha->add_option("--radius-cm", radius_cm, "object radius, cm");
    pha->add_option("--height-cm", height_cm, "object height, cm");
    pha->add_option("--rods", n_rods, "number of rod inserts");
    pha->add_option("--materials-dir", materials_dir, "material table directory");

    std::string profile_spec, profile_out;
    auto* met = app.add_subcommand("metrics", "MSE/NCC/CNR and profiles of images or volumes");
    met->add_option("--seed", flags.seed, "unused (deterministic command)");
    met->add_option("--threads", flags.threads, "unused (single-pass command)");
    met->add_option("--a", a_path, "first image (.xprj or .xvol)")->required();
    met->add_option("--b", b_path, "second image for MSE/NCC");
    met->add_option("--roi", roi_spec, "CNR rectangles: roi_row,roi_col,h,w,bg_row,bg_col,h,w");
    met->add_option("--slice", slice, "volume slice / stack angle index");
    met->add_option("--out", out_path, "output CSV (default: stdout)");
    met->add_option("--profile", profile_spec, "row-band profile: row0,row1[,col0,col1]");
    met->add_option("--profile-out", profile_out, "profile CSV path (default: profile.csv)");

    auto* ins = app.add_subcommand("inspect", "dump file headers, export slices");
    ins->add_option("--seed", flags.seed, "unused (deterministic command)");
    ins->add_option("--threads", flags.threads, "unused (single-pass command)");
    ins->add_option("--file", a_path, "file to inspect")->required();
    ins->add_option("--slice", slice, "slice index for export");
    ins->add_option("--export", pgm_out, "slice export path (.pgm or .csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(flags, what, angles, sim->count("--angles") > 0);
        if (rec->parsed())
            return cmd_reconstruct(flags, stack_path, flat_path, out_path, dim);
        if (cor->parsed())
            return cmd_correct(flags, stack_path, flat_path);
        if (pha->parsed())
            return cmd_phantom(kind, out_path, dim, voxel_cm, materials_dir, radius_cm,
                               height_cm, n_rods);
        if (met->parsed())
            return cmd_metrics(a_path, b_path, roi_spec, slice, out_path, profile_spec,
                               profile_out);
        if (ins->parsed())
            return cmd_inspect(a_path, slice, pgm_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
