#include "conflab/cg.hpp"

#include <cmath>
#include <functional>

#include "conflab/errors.hpp"
#include "conflab/parallel.hpp"

namespace conflab {

namespace {

using ApplyFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

CgResult cg_core(const ApplyFn& apply, const std::vector<double>& b, std::vector<double>& x,
                 const CgSettings& settings, std::int64_t n) {
    CgResult result;
    const std::int64_t maxIter = settings.maxIter > 0 ? settings.maxIter : 10 * n;

    const double bnorm = det_nrm2(b);
    if (bnorm == 0.0) {
        x.assign(static_cast<std::size_t>(n), 0.0);
        result.converged = true;
        return result;
    }
    const double target = settings.relTol * bnorm;

    std::vector<double> r(static_cast<std::size_t>(n)), p, Ap(static_cast<std::size_t>(n));
    auto trueResidual = [&]() {
        apply(x, Ap);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - Ap[static_cast<std::size_t>(i)];
        return det_nrm2(r);
    };

    std::vector<double> best = x;
    double bestResidual = trueResidual();
    double checkpointResidual = bestResidual;
    p = r;
    double rr = det_dot(r, r);

    // The recurrence residual drifts from the true one near convergence, so a
    // met recurrence target is only provisional: verify against b - Ax and
    // tighten the recurrence goal until the true residual passes (or stalls).
    double recurrenceTarget = 0.5 * target;
    double prevRoundResidual = bestResidual;
    std::int64_t sinceRestart = 0;

    while (result.iterations < maxIter) {
        if (std::sqrt(rr) <= recurrenceTarget) {
            const double trueRes = trueResidual();  // refreshes r from x
            if (trueRes <= bestResidual) {
                best = x;
                bestResidual = trueRes;
            } else {
                x = best;
                trueResidual();
            }
            if (bestResidual <= target) break;
            if (bestResidual > 0.9 * prevRoundResidual) break;  // rounding floor
            prevRoundResidual = bestResidual;
            recurrenceTarget = 0.25 * bestResidual;
            p = r;
            rr = det_dot(r, r);
            sinceRestart = 0;
            continue;
        }

        apply(p, Ap);
        const double pAp = det_dot(p, Ap);
        if (pAp <= 0.0)
            fail_numerical("cg: nonpositive curvature direction, operator is not positive definite");
        const double alpha = rr / pAp;
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
        }
        const double rrNew = det_dot(r, r);
        ++result.iterations;
        ++sinceRestart;

        if (sinceRestart >= settings.restartEvery) {
            // safeguarded restart: keep the best iterate, residual checkpoints
            // must not increase
            const double trueRes = trueResidual();
            if (trueRes <= bestResidual) {
                best = x;
                bestResidual = trueRes;
            } else {
                x = best;
                trueResidual();
            }
            if (bestResidual > checkpointResidual * (1.0 + 1e-12))
                fail_numerical("cg: residual increased across a restart checkpoint");
            checkpointResidual = bestResidual;
            p = r;
            rr = det_dot(r, r);
            sinceRestart = 0;
            continue;
        }

        const double beta = rrNew / rr;
        rr = rrNew;
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            p[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
    }

    const double finalRes = trueResidual();
    if (finalRes <= bestResidual) {
        bestResidual = finalRes;
    } else {
        x = best;
    }
    result.relResidual = bestResidual / bnorm;
    result.converged = bestResidual <= target * (1.0 + 1e-12);
    return result;
}

}  // namespace

CgResult cg_solve(const SparseOperator& A, const std::vector<double>& b, std::vector<double>& x,
                  const CgSettings& settings) {
    x.resize(b.size(), 0.0);
    return cg_core([&](const std::vector<double>& v, std::vector<double>& out) { A.apply(v, out); },
                   b, x, settings, A.rows);
}

CgResult cg_solve_shifted(const SparseOperator& A, const std::vector<double>& d, double shift,
                          const std::vector<double>& b, std::vector<double>& x,
                          const CgSettings& settings) {
    x.resize(b.size(), 0.0);
    return cg_core(
        [&](const std::vector<double>& v, std::vector<double>& out) { A.applyShifted(v, d, shift, out); },
        b, x, settings, A.rows);
}

}  // namespace conflab
