#pragma once

#include "svput/config.hpp"

#include <nlohmann/json.hpp>

namespace svput {

/// Exit-code contract shared by all subcommands:
/// 0 ok, 2 model-class rejection (nonnegative Fichera), 3 numerical failure,
/// 4 acceptance/structure violation. Config errors throw before any
/// computation and map to 1 in the executable.
struct CommandResult {
    int exit_code = 0;
    nlohmann::json summary;
};

enum class ConvergeAxis { Epsilon, Grid, Domain, Paths };

/// Solves the pricing problem and reports the spot price; writes the surface
/// CSV (+sidecar) and price_summary.json into the configured directory.
CommandResult cmd_price(const RunConfig& cfg);

/// Solve + boundary extraction + structure checks; writes boundary.csv and
/// structure_report.json. Nonzero exit when any structure check fails.
CommandResult cmd_boundary(const RunConfig& cfg);

/// Cross-verifies the PDE price against the Monte Carlo optimal-stopping
/// estimates on one common seed; writes the estimate JSONs, the exercise-time
/// histogram and verify_summary.json. Nonzero exit when a band is violated.
CommandResult cmd_verify(const RunConfig& cfg);

/// Re-runs the pipeline along one refinement axis and writes a convergence
/// table CSV with successive differences. Legs run on a small worker pool;
/// artifact writing stays serialized.
CommandResult cmd_converge(const RunConfig& cfg, ConvergeAxis axis, int levels = 3);

ConvergeAxis parse_axis(const std::string& name);

} // namespace svput
