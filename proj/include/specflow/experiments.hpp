#pragma once

#include <string>
#include <vector>

#include "specflow/config.hpp"

namespace specflow {

inline constexpr const char* kToolVersion = "specflow 1.0.0";

struct RunArtifacts {
    int exit_code = 0;  // 0 ok, 2 when a configured assertion fails
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

// Execute the configured experiment; writes CSV rows, a JSON summary and a
// run manifest under experiment.output.
RunArtifacts run_experiment(const Config& cfg);

// Render log-log SVG plots from run summaries (one overlay plot).
void render_plot(const std::vector<std::string>& summary_paths, const std::string& out_path);

// Human-readable continued-fraction table for `specflow cf`.
std::string cf_table(const std::string& alpha_spec, int depth, double c_const);

}  // namespace specflow
