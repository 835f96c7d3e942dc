#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "conflab/field.hpp"
#include "conflab/grid.hpp"
#include "conflab/metric.hpp"
#include "conflab/pipeline.hpp"

namespace conflab {

enum class RunMode { Classify, SolveConstant, SolvePrescribed, TwoStage, Manufactured, Obstruction };

const char* run_mode_name(RunMode mode);

/// A parsed and validated scenario config.  Holds the grid behind a stable
/// address because the metric and the fields point at it; move-only.
///
/// Config document layout (strict: unknown keys are rejected):
///   grid:    { n, shape, lengths, closed? }         closed = torus, default slab
///   metric:  { kind: flat | conformal | potential | conformal-potential,
///              factor?, potential? }                 expressions in x1..xn
///   problem: { mode, boundary?, target?, gamma?, amplitude?, factor? }
///            boundary: { kind: constant | expression | power-factor | log-factor,
///                        value? | expression? }
///   solver:  { relResidual?, maxSteps?, epsSign?, safety?, strategy? }
///   output:  { report?, dumpFields? }
struct Scenario {
    nlohmann::ordered_json echo;  ///< the config document as given
    std::unique_ptr<ChartGrid> grid;
    std::optional<ConformalMetric> metric;
    RunMode mode = RunMode::Classify;
    std::optional<BoundaryField> boundary;  ///< solve modes
    std::optional<ScalarField> target;      ///< prescribed / two-stage
    std::optional<ScalarField> factor;      ///< obstruction: the factor to test
    double amplitude = 0.0;                 ///< manufactured runs
    SolverOptions options;
    std::string reportPath;
    bool dumpFields = false;
};

/// Parse a config document; `origin` names it in error messages and derives
/// the default report path (<origin stem>.report.json).
Scenario parse_scenario(const nlohmann::ordered_json& doc, const std::string& origin);

/// Load and parse a config file.
Scenario load_scenario(const std::string& path);

}  // namespace conflab
