#pragma once
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "xscat/correction.hpp"
#include "xscat/scan_geometry.hpp"

namespace xscat {

// Declarative run description: a plain-text file of [section] blocks with
// key = value lines ('#' comments). See the README for the grammar. CLI
// flags override file keys. Validation is total: every problem is collected
// before any computation starts.
struct RunConfig {
    // [paths]
    std::filesystem::path materials_dir;
    std::vector<std::string> material_files; // id 1..N in order; id 0 is vacuum
    std::filesystem::path spectrum_file;
    std::filesystem::path detector_response_file;
    std::filesystem::path phantom_file;
    std::filesystem::path output_dir = ".";

    // [geometry]
    double sdd_cm = 0.0, sod_cm = 0.0;
    int det_nu = 0, det_nv = 0;
    double pixel_pitch_cm = 0.0;
    int n_angles = 0;

    // [sim]
    SimConfig sim;

    // [correction]
    CorrectionConfig correction;
    // class_map entries as "material_name:density" with "air" for vacuum
    std::vector<std::string> class_map_spec;

    int threads = 1;
};

// Raw parsed file: section -> key -> value.
using IniData = std::map<std::string, std::map<std::string, std::string>>;
IniData parse_ini(const std::filesystem::path& path);

// Builds a RunConfig from the parsed file, collecting all errors.
RunConfig build_run_config(const IniData& ini, const std::filesystem::path& base_dir,
                           std::vector<std::string>& errors);

// File-existence and consistency checks; appends to errors.
void validate_run_config(const RunConfig& cfg, std::vector<std::string>& errors);

struct LoadedInputs {
    std::vector<Material> materials; // [0] = vacuum
    Spectrum spectrum;
    DetectorResponse response;
    VoxelPhantom phantom;
    ScanGeometry geometry;
};

// Loads everything the config references; resolves the class map against the
// material names. Throws on failure (call after validate_run_config).
LoadedInputs load_inputs(RunConfig& cfg);

} // namespace xscat
