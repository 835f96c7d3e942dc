#pragma once

#include <vector>

#include "conflab/subsuper.hpp"

namespace conflab {

/// Residual of a candidate solution of -a Lap_g u + S_g u = t u^(p-1),
/// u = boundary data on the faces.
struct ResidualReport {
    double interiorSup = 0.0;  ///< max |defect| over interior nodes
    double interiorL2 = 0.0;   ///< volume-weighted rms of the defect
    double boundarySup = 0.0;  ///< max |u - data| over boundary nodes
};

ResidualReport equation_residual(const ConformalMetric& metric, const ScalarField& u,
                                 const TargetCurvature& target, const BoundaryField& boundary);

struct IterationSettings {
    double shiftA = 0.0;        ///< linearization shift (choose_monotone_shift)
    double tolSup = 0.0;        ///< absolute step-difference stop
    double tolResidual = 0.0;   ///< absolute interior-sup residual stop
    double tolMono = 0.0;       ///< slack allowed on the monotonicity checks
    std::int64_t maxSteps = 500;
    bool enforceMonotone = true;  ///< off for the manufactured-solution mode
    double rangeMin = 0.0;        ///< iterate range the shift was validated on
    double rangeMax = 0.0;
};

/// Settings for iterating from a verified pair: the shift comes from the
/// bracket [min lower, max upper], tolerances from the stated defaults
///   tolSup      = 1e-10 * (1 + max upper)
///   tolResidual = relResidual * operator scale   (relResidual default 1e-9)
///   tolMono     = 1e-12 * (1 + max upper).
IterationSettings make_iteration_settings(const ConformalMetric& metric,
                                          const SubSuperPair& pair,
                                          double relResidual = 1e-9,
                                          std::int64_t maxSteps = 500);

struct StepRecord {
    double supDiff = 0.0;
    double residualSup = 0.0;
    double residualL2 = 0.0;
};

struct IterationResult {
    ScalarField solution;
    std::vector<StepRecord> trace;
    std::int64_t steps = 0;
    bool converged = false;
    double maxMonotoneViolation = 0.0;  ///< largest observed u_{k+1} - u_k
    double maxBoundViolation = 0.0;     ///< largest excursion outside the bracket
    ResidualReport finalResidual;
};

/// Monotone iteration from the upper solution: each step solves
///   (-a Lap_g + A) u_new = A u - S_g u + t u^(p-1),  u_new = data on the faces,
/// with A chosen so the right side is monotone in u on the bracket.  The
/// M-matrix inverse keeps the iterates ordered; that is checked each step (to
/// tolMono) rather than assumed, and a violation aborts.  Convergence is
/// declared when both the step difference and the equation residual pass.
IterationResult iterate_monotone(const ConformalMetric& metric, const SubSuperPair& pair,
                                 const IterationSettings& settings);

/// Fixed-point iteration for the manufactured-solution runs: same update, but
/// started from `seed` and without the ordering checks (the seed need not be a
/// super-solution).  The bracket in `settings` must still contain the
/// iterates; leaving it is reported as a numerical failure.
IterationResult iterate_fixed_point(const ConformalMetric& metric, const SubSuperPair& pair,
                                    const ScalarField& seed, const IterationSettings& settings);

}  // namespace conflab
