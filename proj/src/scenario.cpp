#include "conflab/scenario.hpp"

#include <filesystem>
#include <initializer_list>
#include <sstream>

#include "conflab/errors.hpp"
#include "conflab/expr.hpp"
#include "conflab/io.hpp"
#include "conflab/verify.hpp"

namespace conflab {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_keys(const ordered_json& obj, const std::string& block,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (known) continue;
        std::ostringstream msg;
        msg << "unknown key \"" << item.key() << "\" in " << block << " (allowed:";
        for (const char* key : allowed) msg << " " << key;
        msg << ")";
        fail_config(msg.str());
    }
}

const ordered_json& require_block(const ordered_json& doc, const char* key) {
    if (!doc.contains(key)) fail_config(std::string("missing config block \"") + key + "\"");
    const ordered_json& block = doc.at(key);
    if (!block.is_object()) fail_config(std::string("config block \"") + key + "\" must be an object");
    return block;
}

template <typename T>
T get_as(const ordered_json& obj, const std::string& block, const char* key) {
    if (!obj.contains(key))
        fail_config("missing key \"" + std::string(key) + "\" in " + block);
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail_config("key \"" + std::string(key) + "\" in " + block + " has the wrong type");
    }
}

template <typename T>
T get_or(const ordered_json& obj, const std::string& block, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return get_as<T>(obj, block, key);
}

Expression parse_expression(const ordered_json& obj, const std::string& block, const char* key) {
    return Expression::parse(get_as<std::string>(obj, block, key));
}

std::unique_ptr<ChartGrid> parse_grid(const ordered_json& doc) {
    const ordered_json& block = require_block(doc, "grid");
    check_keys(block, "grid", {"n", "shape", "lengths", "closed"});
    const int n = get_as<int>(block, "grid", "n");
    const auto shape = get_as<std::vector<int>>(block, "grid", "shape");
    const auto lengths = get_as<std::vector<double>>(block, "grid", "lengths");
    const bool closed = get_or<bool>(block, "grid", "closed", false);
    return std::make_unique<ChartGrid>(closed ? ChartGrid::torus(n, shape, lengths)
                                              : ChartGrid::slab(n, shape, lengths));
}

ConformalMetric parse_metric(const ordered_json& doc, const ChartGrid& grid) {
    if (!doc.contains("metric")) return ConformalMetric::flat(grid);
    const ordered_json& block = require_block(doc, "metric");
    check_keys(block, "metric", {"kind", "factor", "potential"});
    const std::string kind = get_or<std::string>(block, "metric", "kind", "flat");

    auto samplePositiveFactor = [&]() {
        ScalarField psi = sample_expression(grid, parse_expression(block, "metric", "factor"));
        if (psi.min() <= 0.0) {
            std::ostringstream msg;
            msg << "the conformal factor must be strictly positive on the grid (min "
                << psi.min() << ")";
            fail_config(msg.str());
        }
        return psi;
    };

    if (kind == "flat") {
        check_keys(block, "metric", {"kind"});
        return ConformalMetric::flat(grid);
    }
    if (kind == "conformal") {
        check_keys(block, "metric", {"kind", "factor"});
        return ConformalMetric::conformallyFlat(grid, samplePositiveFactor());
    }
    if (kind == "potential") {
        check_keys(block, "metric", {"kind", "potential"});
        return ConformalMetric::flatWithPotential(
            grid, sample_expression(grid, parse_expression(block, "metric", "potential")));
    }
    if (kind == "conformal-potential") {
        check_keys(block, "metric", {"kind", "factor", "potential"});
        ScalarField psi = samplePositiveFactor();
        return ConformalMetric::withPotential(
            grid, std::move(psi),
            sample_expression(grid, parse_expression(block, "metric", "potential")));
    }
    fail_config("metric kind must be flat, conformal, potential, or conformal-potential");
}

RunMode parse_mode(const std::string& name) {
    if (name == "classify") return RunMode::Classify;
    if (name == "solve-constant") return RunMode::SolveConstant;
    if (name == "solve-prescribed") return RunMode::SolvePrescribed;
    if (name == "two-stage") return RunMode::TwoStage;
    if (name == "mms") return RunMode::Manufactured;
    if (name == "obstruction") return RunMode::Obstruction;
    fail_config("problem.mode must be classify, solve-constant, solve-prescribed, two-stage, "
                "mms, or obstruction (got \"" +
                name + "\")");
}

BoundaryField parse_boundary(const ordered_json& problem, const ChartGrid& grid) {
    if (!grid.hasBoundary()) fail_config("boundary data needs a slab grid");
    if (!problem.contains("boundary")) return BoundaryField(grid, 1.0);
    const ordered_json& block = require_block(problem, "boundary");
    const std::string kind = get_or<std::string>(block, "problem.boundary", "kind", "constant");

    if (kind == "constant") {
        check_keys(block, "problem.boundary", {"kind", "value"});
        return BoundaryField(grid, get_or<double>(block, "problem.boundary", "value", 1.0));
    }
    if (kind == "expression") {
        check_keys(block, "problem.boundary", {"kind", "expression"});
        return sample_boundary_expression(
            grid, parse_expression(block, "problem.boundary", "expression"));
    }
    if (kind == "power-factor" || kind == "log-factor") {
        check_keys(block, "problem.boundary", {"kind", "expression"});
        const BoundaryField raw = sample_boundary_expression(
            grid, parse_expression(block, "problem.boundary", "expression"));
        return boundary_data_from_factor(grid,
                                         kind == "power-factor" ? BoundaryMapKind::PowerFactor
                                                                : BoundaryMapKind::LogFactor,
                                         raw);
    }
    fail_config("boundary kind must be constant, expression, power-factor, or log-factor");
}

SolverOptions parse_solver(const ordered_json& doc) {
    SolverOptions options;
    if (!doc.contains("solver")) return options;
    const ordered_json& block = require_block(doc, "solver");
    check_keys(block, "solver", {"relResidual", "maxSteps", "epsSign", "safety", "strategy"});
    options.relResidual = get_or<double>(block, "solver", "relResidual", options.relResidual);
    if (!(options.relResidual > 0.0)) fail_config("solver.relResidual must be positive");
    options.maxSteps = get_or<std::int64_t>(block, "solver", "maxSteps", options.maxSteps);
    if (options.maxSteps < 1) fail_config("solver.maxSteps must be at least 1");
    options.epsSign = get_or<double>(block, "solver", "epsSign", options.epsSign);
    if (options.epsSign < 0.0) fail_config("solver.epsSign must be nonnegative");
    options.safety = get_or<double>(block, "solver", "safety", options.safety);
    if (!(options.safety > 0.0 && options.safety < 1.0))
        fail_config("solver.safety must lie strictly between 0 and 1");
    const std::string strategy = get_or<std::string>(block, "solver", "strategy", "auto");
    if (strategy == "auto")
        options.strategy = ConstantStrategy::Auto;
    else if (strategy == "positive-curvature")
        options.strategy = ConstantStrategy::PositiveCurvature;
    else
        fail_config("solver.strategy must be auto or positive-curvature");
    return options;
}

std::string default_report_path(const std::string& origin) {
    if (origin.empty() || origin.front() == '<') return "report.json";
    std::filesystem::path p(origin);
    p.replace_extension();
    return p.string() + ".report.json";
}

}  // namespace

const char* run_mode_name(RunMode mode) {
    switch (mode) {
    case RunMode::Classify: return "classify";
    case RunMode::SolveConstant: return "solve-constant";
    case RunMode::SolvePrescribed: return "solve-prescribed";
    case RunMode::TwoStage: return "two-stage";
    case RunMode::Manufactured: return "mms";
    case RunMode::Obstruction: return "obstruction";
    }
    return "?";
}

Scenario parse_scenario(const ordered_json& doc, const std::string& origin) {
    if (!doc.is_object()) fail_config(origin + ": the config must be a JSON object");
    check_keys(doc, "the config", {"grid", "metric", "problem", "solver", "output"});

    Scenario s;
    s.echo = doc;
    s.grid = parse_grid(doc);
    s.metric = parse_metric(doc, *s.grid);
    s.options = parse_solver(doc);

    const ordered_json& problem = require_block(doc, "problem");
    s.mode = parse_mode(get_as<std::string>(problem, "problem", "mode"));

    switch (s.mode) {
    case RunMode::Classify:
        check_keys(problem, "problem (classify)", {"mode"});
        break;
    case RunMode::SolveConstant:
        check_keys(problem, "problem (solve-constant)", {"mode", "boundary"});
        s.boundary = parse_boundary(problem, *s.grid);
        break;
    case RunMode::SolvePrescribed:
    case RunMode::TwoStage: {
        check_keys(problem, std::string("problem (") + run_mode_name(s.mode) + ")",
                   {"mode", "boundary", "target", "gamma"});
        s.boundary = parse_boundary(problem, *s.grid);
        s.target = sample_expression(*s.grid, parse_expression(problem, "problem", "target"));
        if (problem.contains("gamma"))
            s.options.gamma = get_as<double>(problem, "problem", "gamma");
        break;
    }
    case RunMode::Manufactured:
        check_keys(problem, "problem (mms)", {"mode", "amplitude"});
        if (s.metric->kindName() != "flat")
            fail_config("mms runs on the flat metric; drop the metric block");
        s.amplitude = get_or<double>(problem, "problem", "amplitude", 0.01);
        break;
    case RunMode::Obstruction:
        check_keys(problem, "problem (obstruction)", {"mode", "factor"});
        if (s.grid->hasBoundary())
            fail_config("obstruction mode needs a closed grid (set grid.closed = true)");
        s.factor = sample_expression(*s.grid, parse_expression(problem, "problem", "factor"));
        break;
    }

    if (doc.contains("output")) {
        const ordered_json& block = require_block(doc, "output");
        check_keys(block, "output", {"report", "dumpFields"});
        s.reportPath = get_or<std::string>(block, "output", "report", "");
        s.dumpFields = get_or<bool>(block, "output", "dumpFields", false);
    }
    if (s.reportPath.empty()) s.reportPath = default_report_path(origin);
    return s;
}

Scenario load_scenario(const std::string& path) {
    return parse_scenario(read_json_file(path), path);
}

}  // namespace conflab
