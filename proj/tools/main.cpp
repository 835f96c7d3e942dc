#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "conflab/errors.hpp"
#include "conflab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"conformal-class classification and curvature-prescription toolkit"};
    app.set_version_flag("--version", std::string(conflab::kToolVersion));
    app.require_subcommand(1);

    conflab::CliOverrides overrides;
    double relResidual = 0.0;
    std::int64_t maxSteps = 0;
    double epsSign = 0.0;

    std::string runConfig;
    CLI::App* run = app.add_subcommand("run", "execute one scenario config");
    run->add_option("config", runConfig, "scenario config (JSON)")->required();

    std::string batchDir;
    CLI::App* batch = app.add_subcommand("batch", "execute every config in a directory");
    batch->add_option("dir", batchDir, "directory of scenario configs")->required();

    for (CLI::App* cmd : {run, batch}) {
        cmd->add_option("--tol-residual", relResidual,
                        "residual tolerance relative to the operator scale");
        cmd->add_option("--max-steps", maxSteps, "iteration step limit");
        cmd->add_option("--eps-sign", epsSign, "eigenvalue sign band (absolute)");
        cmd->add_flag("--dump-fields", overrides.dumpFields, "write field dumps");
    }

    std::string reportPath;
    CLI::App* plots = app.add_subcommand("plots", "mid-plane CSV slices of a report's dumps");
    plots->add_option("report", reportPath, "report written by run")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->count("--tol-residual") || batch->count("--tol-residual"))
        overrides.relResidual = relResidual;
    if (run->count("--max-steps") || batch->count("--max-steps"))
        overrides.maxSteps = maxSteps;
    if (run->count("--eps-sign") || batch->count("--eps-sign"))
        overrides.epsSign = epsSign;

    try {
        if (run->parsed()) return conflab::run_config(runConfig, overrides);
        if (batch->parsed()) return conflab::run_batch(batchDir, overrides);
        return conflab::emit_plots(reportPath);
    } catch (const conflab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
