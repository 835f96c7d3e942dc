#include "conflab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conflab/errors.hpp"
#include "conflab/io.hpp"
#include "conflab/pipeline.hpp"
#include "conflab/spectral.hpp"
#include "conflab/verify.hpp"

namespace conflab {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Numerical: return "numerical";
    }
    return "?";
}

ordered_json classification_json(const SignReport& r) {
    return {{"robinValue", r.robinValue},
            {"dirichletValue", r.dirichletValue},
            {"robinSign", r.robinSign},
            {"dirichletSign", r.dirichletSign},
            {"epsSign", r.epsSign},
            {"gap", r.gap},
            {"opScale", r.opScale},
            {"consistent", r.consistent}};
}

ordered_json residual_json(const ResidualReport& r) {
    return {{"interiorSup", r.interiorSup},
            {"interiorL2", r.interiorL2},
            {"boundarySup", r.boundarySup}};
}

ordered_json pair_json(const PairCheck& c) {
    return {{"subDefect", c.subDefect},
            {"supDefect", c.supDefect},
            {"orderingGap", c.orderingGap},
            {"lowerBoundaryExcess", c.lowerBoundaryExcess},
            {"upperBoundaryShort", c.upperBoundaryShort},
            {"minLower", c.minLower},
            {"tolIneq", c.tolIneq},
            {"verified", c.pass}};
}

ordered_json iteration_json(const IterationResult& r, const IterationSettings& s) {
    ordered_json trace = ordered_json::array();
    for (const StepRecord& st : r.trace)
        trace.push_back({{"supDiff", st.supDiff},
                         {"residualSup", st.residualSup},
                         {"residualL2", st.residualL2}});
    return {{"steps", r.steps},
            {"converged", r.converged},
            {"maxMonotoneViolation", r.maxMonotoneViolation},
            {"maxBoundViolation", r.maxBoundViolation},
            {"finalResidual", residual_json(r.finalResidual)},
            {"settings",
             {{"shiftA", s.shiftA},
              {"tolSup", s.tolSup},
              {"tolResidual", s.tolResidual},
              {"tolMono", s.tolMono},
              {"maxSteps", s.maxSteps},
              {"enforceMonotone", s.enforceMonotone},
              {"rangeMin", s.rangeMin},
              {"rangeMax", s.rangeMax}}},
            {"trace", std::move(trace)}};
}

ordered_json curvature_json(const CurvatureCheck& c) {
    return {{"deviationSup", c.deviationSup},
            {"deviationL2", c.deviationL2},
            {"boundarySup", c.boundarySup},
            {"tolSup", c.tolSup},
            {"tolBoundary", c.tolBoundary},
            {"pass", c.pass}};
}

ordered_json constants_json(const std::map<std::string, double>& m) {
    ordered_json out = ordered_json::object();
    for (const auto& [key, value] : m) out[key] = value;
    return out;
}

ordered_json range_json(const ScalarField& f) {
    return ordered_json::array({f.min(), f.max()});
}

ordered_json constant_json(const ConstantSolve& r) {
    return {{"recipe", constant_recipe_name(r.recipe)},
            {"lambda", r.lambda},
            {"classification", classification_json(r.classification)},
            {"constants", constants_json(r.constants)},
            {"pair", pair_json(r.pair.check)},
            {"iteration", iteration_json(r.iteration, r.settings)},
            {"curvature", curvature_json(r.curvature)},
            {"solutionRange", range_json(r.solution)}};
}

ordered_json prescribed_json(const PrescribedSolve& r) {
    ordered_json out = {{"recipe", recipe_name(r.dispatch.recipe)},
                        {"boundaryScale", r.boundaryScale},
                        {"classification", classification_json(r.classification)},
                        {"constants", constants_json(r.constants)},
                        {"pair", pair_json(r.pair.check)},
                        {"iteration", iteration_json(r.iteration, r.settings)},
                        {"curvature", curvature_json(r.curvature)},
                        {"solutionRange", range_json(r.solution)}};
    if (r.dispatch.recipe == PrescribedRecipe::ZeroNegativeNearBoundary) {
        out["gamma"] = r.dispatch.gamma;
        out["beta"] = r.beta;
    }
    if (r.flatten) out["flatten"] = constant_json(*r.flatten);
    return out;
}

}  // namespace

RunOutcome run_scenario(const Scenario& s) {
    RunOutcome out;
    ordered_json& rep = out.report;
    rep["schema"] = kReportSchema;
    rep["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    rep["mode"] = run_mode_name(s.mode);
    rep["config"] = s.echo;

    const auto t0 = Clock::now();
    try {
        switch (s.mode) {
        case RunMode::Classify: {
            const SignReport r = classify(*s.metric, s.options.epsSign);
            rep["classification"] = classification_json(r);
            out.fields.emplace_back("curvature", s.metric->scalarCurvature());
            break;
        }
        case RunMode::SolveConstant: {
            const ConstantSolve r = solve_constant(*s.metric, *s.boundary, s.options);
            rep["solve"] = constant_json(r);
            out.fields.emplace_back("solution", r.solution);
            out.fields.emplace_back("curvature", r.curvature.recomputed);
            out.fields.emplace_back("lower", r.pair.lower);
            out.fields.emplace_back("upper", r.pair.upper);
            break;
        }
        case RunMode::SolvePrescribed:
        case RunMode::TwoStage: {
            const PrescribedSolve r =
                s.mode == RunMode::TwoStage
                    ? solve_two_stage(*s.metric, *s.boundary, *s.target, s.options)
                    : solve_prescribed(*s.metric, *s.boundary, *s.target, s.options);
            rep["solve"] = prescribed_json(r);
            out.fields.emplace_back("solution", r.solution);
            out.fields.emplace_back("curvature", r.curvature.recomputed);
            out.fields.emplace_back("lower", r.pair.lower);
            out.fields.emplace_back("upper", r.pair.upper);
            out.fields.emplace_back("target", *s.target);
            break;
        }
        case RunMode::Manufactured: {
            const ManufacturedSolve r = solve_manufactured(*s.grid, s.amplitude, s.options);
            rep["manufactured"] = {{"amplitude", r.mms.amplitude},
                                   {"errorSup", r.errorSup},
                                   {"errorL2", r.errorL2},
                                   {"truncationSup", r.truncationSup},
                                   {"truncationL2", r.truncationL2}};
            rep["iteration"] = iteration_json(r.iteration, r.settings);
            rep["curvature"] = curvature_json(r.curvature);
            out.fields.emplace_back("solution", r.iteration.solution);
            out.fields.emplace_back("exact", r.mms.exact);
            out.fields.emplace_back("source", r.mms.source);
            break;
        }
        case RunMode::Obstruction: {
            const ObstructionReport r = closed_torus_obstruction_check(*s.grid, *s.factor);
            rep["obstruction"] = {{"lhs", r.lhs},
                                  {"rhs", r.rhs},
                                  {"relGap", r.relGap},
                                  {"maxInducedCurvature", r.maxS},
                                  {"identityHolds", r.identityHolds},
                                  {"obstructed", r.obstructed}};
            out.fields.emplace_back("factor", *s.factor);
            out.fields.emplace_back("inducedCurvature", r.inducedS);
            if (!r.identityHolds) {
                std::ostringstream msg;
                msg << "the pairing identity gap " << r.relGap << " exceeds 1e-10";
                fail_numerical(msg.str());
            }
            break;
        }
        }
    } catch (const Error& e) {
        rep["error"] = {{"kind", error_kind_name(e.kind())}, {"message", e.what()}};
        out.exitCode = e.exit_code();
    }
    rep["timings"] = {{"solveMs", ms_since(t0)}};
    return out;
}

int run_config(const std::string& path, const CliOverrides& overrides) {
    const auto t0 = Clock::now();
    try {
        Scenario s = load_scenario(path);
        if (overrides.relResidual) {
            if (!(*overrides.relResidual > 0.0))
                fail_config("--tol-residual must be positive");
            s.options.relResidual = *overrides.relResidual;
        }
        if (overrides.maxSteps) {
            if (*overrides.maxSteps < 1) fail_config("--max-steps must be at least 1");
            s.options.maxSteps = *overrides.maxSteps;
        }
        if (overrides.epsSign) {
            if (*overrides.epsSign < 0.0) fail_config("--eps-sign must be nonnegative");
            s.options.epsSign = *overrides.epsSign;
        }
        if (overrides.dumpFields) s.dumpFields = true;

        RunOutcome out = run_scenario(s);

        const fs::path reportPath(s.reportPath);
        if (!reportPath.parent_path().empty()) fs::create_directories(reportPath.parent_path());
        if (s.dumpFields) {
            ordered_json fields = ordered_json::object();
            fs::path stem = reportPath;
            stem.replace_extension();
            for (const auto& [name, field] : out.fields) {
                const DumpPaths paths =
                    write_field_dump(field, name, stem.string() + "." + name);
                fields[name] = {{"header", fs::path(paths.header).filename().string()},
                                {"sidecar", fs::path(paths.sidecar).filename().string()}};
            }
            out.report["fields"] = std::move(fields);
        }
        out.report["timings"]["totalMs"] = ms_since(t0);

        std::ofstream rout(s.reportPath);
        if (!rout) fail_config("cannot write \"" + s.reportPath + "\"");
        rout << out.report.dump(2) << "\n";

        std::printf("%s: %s exit %d (%s)\n", path.c_str(), run_mode_name(s.mode),
                    out.exitCode, s.reportPath.c_str());
        if (out.exitCode != 0)
            std::fprintf(stderr, "%s: %s\n", path.c_str(),
                         out.report["error"]["message"].get<std::string>().c_str());
        return out.exitCode;
    } catch (const Error& e) {
        std::fprintf(stderr, "%s: %s error: %s\n", path.c_str(), error_kind_name(e.kind()),
                     e.what());
        return e.exit_code();
    }
}

int run_batch(const std::string& dir, const CliOverrides& overrides) {
    std::vector<std::string> configs;
    try {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            // Reports and their field dumps live next to the configs; skip them.
            if (!name.ends_with(".json") || name.find(".report.") != std::string::npos) continue;
            configs.push_back(entry.path().string());
        }
    } catch (const fs::filesystem_error& e) {
        fail_config(std::string("cannot read batch directory: ") + e.what());
    }
    if (configs.empty()) fail_config("no configs in \"" + dir + "\"");
    std::sort(configs.begin(), configs.end());

    int worst = 0;
    for (const std::string& config : configs)
        worst = std::max(worst, run_config(config, overrides));
    std::printf("batch: %zu config(s), worst exit %d\n", configs.size(), worst);
    return worst;
}

int emit_plots(const std::string& reportPath) {
    const ordered_json report = read_json_file(reportPath);
    if (!report.contains("fields") || report.at("fields").empty())
        fail_config("\"" + reportPath +
                    "\" has no field dumps; rerun with output.dumpFields = true");

    const fs::path dir = fs::path(reportPath).parent_path();
    int count = 0;
    for (const auto& item : report.at("fields").items()) {
        std::string headerName;
        try {
            headerName = item.value().at("header").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            fail_config("\"" + reportPath + "\": malformed fields entry: " + e.what());
        }
        const std::string header = (dir / headerName).string();
        const ChartGrid grid = grid_from_dump_header(header);
        const ScalarField field = read_field_dump(grid, header);
        fs::path csv(header);
        csv.replace_extension();
        csv += ".slice.csv";
        write_midplane_csv(field, csv.string());
        std::printf("wrote %s\n", csv.string().c_str());
        ++count;
    }
    std::printf("plots: %d slice file(s)\n", count);
    return 0;
}

}  // namespace conflab
