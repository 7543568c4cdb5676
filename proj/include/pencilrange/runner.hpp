#pragma once

#include <string>
#include <vector>

#include "pencilrange/config.hpp"

namespace pencilrange {

struct RunResult {
    int exit_code = 0;  // 0 ok, 2 validation failure, 3 numerical failure
    std::vector<std::string> artifacts;
    std::string summary;
};

/// Execute one experiment: writes JSON/CSV results, an SVG per plot request
/// and a markdown summary into cfg.out_dir.  Partial artifacts are retained
/// on numerical failure.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Built-in figure presets: stokes-const, stokes-circles, dirac-sigma,
/// jt-sweep.
RunResult run_figure_preset(const std::string& preset, const std::string& out_dir,
                            std::size_t threads, std::uint64_t seed);

}  // namespace pencilrange
