#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conflab/scenario.hpp"

namespace conflab {

inline constexpr const char* kToolName = "conflab";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "conflab-report/1";

/// Command-line overrides applied on top of a scenario's solver block.
struct CliOverrides {
    std::optional<double> relResidual;
    std::optional<std::int64_t> maxSteps;
    std::optional<double> epsSign;
    bool dumpFields = false;  ///< forces dumps on
};

/// Result of executing one scenario: the report document, the process exit
/// code, and the fields available for dumping.  Failures are embedded under
/// "error" rather than escaping; two runs of the same config produce byte
/// identical reports except for the "timings" block.
struct RunOutcome {
    int exitCode = 0;
    nlohmann::ordered_json report;
    std::vector<std::pair<std::string, ScalarField>> fields;
};

RunOutcome run_scenario(const Scenario& s);

/// run subcommand: load, apply overrides, execute, write report and dumps,
/// print a summary line.  Returns the exit code.
int run_config(const std::string& path, const CliOverrides& overrides);

/// batch subcommand: every *.json in the directory (reports excluded), in
/// sorted order; returns the worst exit code.
int run_batch(const std::string& dir, const CliOverrides& overrides);

/// plots subcommand: mid-plane CSV slices next to each dumped field of the
/// report.
int emit_plots(const std::string& reportPath);

}  // namespace conflab
