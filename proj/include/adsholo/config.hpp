#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "adsholo/holography.hpp"

namespace adsholo {

/// Everything a run needs. Sections of the config file map onto the groups below.
struct RunConfig {
    ExperimentPlan plan; // [model], [regions] O and V, [experiment] core keys, [tolerances]

    // [regions]
    BoundaryRegion contrast; // second O for the comparison run of holo-inclusion

    // [experiment]
    int weyl_bulk_index = 0;
    double weyl_final_max = 1e-3;
    double weyl_r2_min = 0.95;
    int n_pairs = 20;
    int ccr_n_max = 40;
    int uc_k_eff = 0; // 0 means K
    std::vector<double> uc_fractions{0.2, 0.4, 0.6, 0.8, 1.0};

    // [output]
    std::string out_dir = "out";
};

/// Defaults of the standard plan: O = both components x (-3.3, 3.3),
/// V = |t| <= 0.5, |x| <= 0.8, contrast = one component x (-0.5, 0.5).
RunConfig default_config();

/// Line-oriented `key = value` with `[section]` headers; `#` and `;` start comments.
/// Unknown sections or keys are errors. Missing keys keep their defaults.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

/// Canonical text form; parse_config_text(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

/// Documented defaults (the output of --print-defaults).
std::string defaults_text();

/// Range and shape validation; throws Error naming the offending key.
void validate_config(const RunConfig& cfg);

// ---- runner ---------------------------------------------------------------

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

const std::vector<std::string>& command_names();

/// Runs one command, writes <out_dir>/<command>.csv (and extra CSVs where noted)
/// plus <out_dir>/<command>.txt, echoes the report to `report`, returns the exit code.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& report);

} // namespace adsholo
