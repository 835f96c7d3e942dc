#include "conflab/iteration.hpp"

#include <algorithm>
#include <cmath>

#include "conflab/assemble.hpp"
#include "conflab/cg.hpp"
#include "conflab/errors.hpp"

namespace conflab {

ResidualReport equation_residual(const ConformalMetric& metric, const ScalarField& u,
                                 const TargetCurvature& target, const BoundaryField& boundary) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;
    const ScalarField& S = metric.scalarCurvature();
    const auto& vol = metric.volumeWeight();

    ScalarField Lu = conformal_stiffness_apply(metric, u);
    ResidualReport report;
    double sumW = 0.0;
    double sumWd2 = 0.0;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        if (grid.isBoundaryNode(i)) continue;
        const double defect =
            Lu[i] + S[i] * u[i] - target.at(i) * std::pow(u[i], pm1);
        report.interiorSup = std::max(report.interiorSup, std::abs(defect));
        const double w = vol[static_cast<std::size_t>(i)];
        sumW += w;
        sumWd2 += w * defect * defect;
    }
    report.interiorL2 = sumW > 0.0 ? std::sqrt(sumWd2 / sumW) : 0.0;
    for (std::int64_t b = 0; b < grid.boundaryNodeCount(); ++b)
        report.boundarySup = std::max(
            report.boundarySup, std::abs(u[grid.boundaryToGrid(b)] - boundary[b]));
    return report;
}

IterationSettings make_iteration_settings(const ConformalMetric& metric,
                                          const SubSuperPair& pair, double relResidual,
                                          std::int64_t maxSteps) {
    IterationSettings s;
    s.rangeMin = pair.lower.min();
    s.rangeMax = pair.upper.max();
    s.shiftA = choose_monotone_shift(metric, pair.target, s.rangeMin, s.rangeMax);
    const double span = 1.0 + s.rangeMax;
    s.tolSup = 1e-10 * span;
    s.tolResidual = relResidual * operator_scale(metric);
    s.tolMono = 1e-12 * span;
    s.maxSteps = maxSteps;
    return s;
}

namespace {

IterationResult run_iteration(const ConformalMetric& metric, const SubSuperPair& pair,
                              const ScalarField& start, const IterationSettings& settings,
                              bool ordered) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;
    if (settings.shiftA <= 0.0)
        fail_config("the iteration shift must be positive");

    AssembledOperator op = assemble_operator(metric, Closure::Dirichlet, false);
    const std::int64_t nAct = op.size();

    // Boundary lift: rhs contribution -couple * data.
    std::vector<double> lift(static_cast<std::size_t>(nAct), 0.0);
    {
        std::vector<double> data(pair.boundary.values.begin(), pair.boundary.values.end());
        op.couple.apply(data, lift);
        for (double& v : lift) v = -v;
    }

    // Per-row curvature and target caches.
    std::vector<double> Srow(static_cast<std::size_t>(nAct));
    std::vector<double> trow(static_cast<std::size_t>(nAct));
    for (std::int64_t r = 0; r < nAct; ++r) {
        const std::int64_t node = op.activeToGrid[static_cast<std::size_t>(r)];
        Srow[static_cast<std::size_t>(r)] = metric.scalarCurvature()[node];
        trow[static_cast<std::size_t>(r)] = pair.target.at(node);
    }

    IterationResult result;
    ScalarField u = start;
    std::vector<double> x = op.gather(u);
    std::vector<double> rhs(static_cast<std::size_t>(nAct));

    const double slack = settings.tolMono;
    for (std::int64_t step = 1; step <= settings.maxSteps; ++step) {
        for (std::int64_t r = 0; r < nAct; ++r) {
            const std::size_t ri = static_cast<std::size_t>(r);
            const double ui = u[op.activeToGrid[ri]];
            rhs[ri] = op.mass[ri] * (settings.shiftA * ui - Srow[ri] * ui +
                                     trow[ri] * std::pow(ui, pm1)) +
                      lift[ri];
        }

        CgResult cg = cg_solve_shifted(op.A, op.mass, settings.shiftA, rhs, x);
        if (!cg.converged)
            fail_numerical("the linearized step solve did not converge (step " +
                           std::to_string(step) + ", relative residual " +
                           std::to_string(cg.relResidual) + ")");

        ScalarField uNew(grid, 0.0);
        op.scatter(x, uNew);
        for (std::int64_t b = 0; b < grid.boundaryNodeCount(); ++b)
            uNew[grid.boundaryToGrid(b)] = pair.boundary[b];

        double supDiff = 0.0;
        double stepMono = -1.0;
        double stepBound = -1.0;
        double minVal = uNew[0];
        for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
            supDiff = std::max(supDiff, std::abs(uNew[i] - u[i]));
            minVal = std::min(minVal, uNew[i]);
            if (ordered) {
                stepMono = std::max(stepMono, uNew[i] - u[i]);
                stepBound = std::max({stepBound, pair.lower[i] - uNew[i],
                                      uNew[i] - pair.upper[i]});
            } else {
                stepBound = std::max({stepBound, settings.rangeMin - uNew[i],
                                      uNew[i] - settings.rangeMax});
            }
        }
        result.maxMonotoneViolation = std::max(result.maxMonotoneViolation, stepMono);
        result.maxBoundViolation = std::max(result.maxBoundViolation, stepBound);

        if (minVal <= 0.0)
            fail_numerical("iterate lost positivity at step " + std::to_string(step));
        if (ordered && stepMono > slack)
            fail_numerical("the iteration broke the descending order at step " +
                           std::to_string(step) + " (rise " + std::to_string(stepMono) +
                           " above the slack " + std::to_string(slack) + ")");
        if (stepBound > slack)
            fail_numerical("an iterate left the bracket the shift was chosen for at step " +
                           std::to_string(step) + " (excursion " + std::to_string(stepBound) +
                           ")");

        u = std::move(uNew);
        result.steps = step;

        ResidualReport res = equation_residual(metric, u, pair.target, pair.boundary);
        result.trace.push_back({supDiff, res.interiorSup, res.interiorL2});
        if (supDiff <= settings.tolSup && res.interiorSup <= settings.tolResidual) {
            result.converged = true;
            result.finalResidual = res;
            break;
        }
    }

    if (!result.converged)
        fail_numerical("the iteration did not converge within " +
                       std::to_string(settings.maxSteps) + " steps (last step difference " +
                       std::to_string(result.trace.back().supDiff) + ", last residual " +
                       std::to_string(result.trace.back().residualSup) + ")");

    result.solution = std::move(u);
    return result;
}

}  // namespace

IterationResult iterate_monotone(const ConformalMetric& metric, const SubSuperPair& pair,
                                 const IterationSettings& settings) {
    if (!settings.enforceMonotone)
        fail_config("iterate_monotone needs the ordering checks on; use the fixed-point "
                    "entry point to drop them");
    return run_iteration(metric, pair, pair.upper, settings, true);
}

IterationResult iterate_fixed_point(const ConformalMetric& metric, const SubSuperPair& pair,
                                    const ScalarField& seed, const IterationSettings& settings) {
    return run_iteration(metric, pair, seed, settings, false);
}

}  // namespace conflab
