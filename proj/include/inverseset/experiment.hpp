#pragma once

#include <string>
#include <vector>

#include "inverseset/config.hpp"
#include "inverseset/sampler.hpp"

namespace inverseset {

/// Runs the experiment described by the config file and writes
/// samples.csv, trace.csv, metadata.json and metrics.json into the
/// output directory (INVERSESET_OUTPUT_DIR overrides the config value).
/// Returns the process exit code: 0 on success, 2 when the run hit its
/// iteration/step budget (partial artifacts are still written), 1 for
/// config or model errors.
int run_experiment(const std::string& config_path, bool verbose = false);

/// Exit-code mapping shared by the runner and the C API.
int exit_code_for(Errc code);

/// Renders a deterministic 800x800 SVG of a completed run directory:
/// feasible-region shading from the grid oracle (2-d code spaces),
/// samples colored by acceptance step, and a legend with the band
/// values. Codes of higher dimension are projected onto the two
/// configured encoding coordinates (scatter only).
void emit_plot(const std::string& run_dir, const std::string& out_svg);

/// Merged metrics table plus ordering assertions for two or more runs of
/// the same problem. Returns the report as a JSON document.
std::string compare_runs(const std::vector<std::string>& run_dirs);

}  // namespace inverseset
