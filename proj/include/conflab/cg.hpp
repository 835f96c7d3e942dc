#pragma once

#include <vector>

#include "conflab/sparse.hpp"

namespace conflab {

struct CgSettings {
    double relTol = 1e-12;       ///< stop at ||b - Ax|| <= relTol * ||b||
    std::int64_t maxIter = 0;    ///< 0: use 10 * n
    std::int64_t restartEvery = 50;
};

struct CgResult {
    std::int64_t iterations = 0;
    double relResidual = 0.0;
    bool converged = false;
};

/// Conjugate gradients on an SPD system, with safeguarded restarts: every
/// restartEvery steps the true residual b - Ax is recomputed, the best iterate
/// so far is kept, and the recurrence restarts from it.  Checkpoint residuals
/// are therefore nonincreasing by construction, and a violation (or a
/// nonpositive curvature direction p'Ap <= 0) aborts with a numerical error
/// instead of returning garbage on an indefinite operator.
///
/// x holds the initial guess on entry and the solution on exit.
CgResult cg_solve(const SparseOperator& A, const std::vector<double>& b,
                  std::vector<double>& x, const CgSettings& settings = {});

/// Same contract for the diagonally shifted operator A + shift * diag(d).
CgResult cg_solve_shifted(const SparseOperator& A, const std::vector<double>& d, double shift,
                          const std::vector<double>& b, std::vector<double>& x,
                          const CgSettings& settings = {});

}  // namespace conflab
