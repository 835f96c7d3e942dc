#pragma once

#include <map>
#include <optional>
#include <string>

#include "conflab/iteration.hpp"
#include "conflab/metric.hpp"
#include "conflab/subsuper.hpp"
#include "conflab/verify.hpp"

namespace conflab {

/// Knobs shared by the solve flows; defaults match the stated tolerances.
struct SolverOptions {
    double relResidual = 1e-9;  ///< tolResidual = relResidual * operator scale
    std::int64_t maxSteps = 500;
    double epsSign = 0.0;  ///< classification band; 0 picks the default
    double safety = 0.1;   ///< margin shaved off every sharp constant
    std::optional<double> gamma;  ///< boundary band width (two-stage flow)
    ConstantStrategy strategy = ConstantStrategy::Auto;
};

/// Constant-curvature solve: classify, build the bracket, iterate, round-trip
/// the curvature.  Fails (Numerical) if any of the checks fail; the returned
/// report holds only verified data.
struct ConstantSolve {
    SignReport classification;
    ConstantRecipe recipe = ConstantRecipe::ZeroEigenvalue;
    double lambda = 0.0;
    SubSuperPair pair;
    IterationSettings settings;
    IterationResult iteration;
    ScalarField solution;
    BoundaryField boundary;
    CurvatureCheck curvature;
    std::map<std::string, double> constants;
};
ConstantSolve solve_constant(const ConformalMetric& metric, const BoundaryField& phi,
                             const SolverOptions& options = {});

/// Prescribed-curvature solve.  Dispatches on the classification and the sign
/// pattern of S; the banded zero-class case runs the two-stage flow (flatten,
/// solve under the flattened metric, compose and rescale), every other covered
/// case iterates directly.  `solution` always attains boundaryScale * phi on
/// the faces and its metric's curvature is checked against S.
struct PrescribedSolve {
    SignReport classification;
    PrescribedDispatch dispatch;
    SubSuperPair pair;  ///< the pair iterated (two-stage: under the flattened metric)
    IterationSettings settings;
    IterationResult iteration;
    ScalarField solution;
    double boundaryScale = 1.0;
    BoundaryField boundary;  ///< boundaryScale * phi
    CurvatureCheck curvature;
    std::map<std::string, double> constants;
    /// Two-stage flow only: the flattening solve and the bracket scales.
    std::optional<ConstantSolve> flatten;
    double beta = 0.0;
};
PrescribedSolve solve_prescribed(const ConformalMetric& metric, const BoundaryField& phi,
                                 const ScalarField& S, const SolverOptions& options = {});

/// The two-stage flow on its own, for the banded case specifically: requires
/// the dispatch to land on the boundary-band recipe and fails (Unsupported)
/// with the applicable mode named otherwise.
PrescribedSolve solve_two_stage(const ConformalMetric& metric, const BoundaryField& phi,
                                const ScalarField& S, const SolverOptions& options = {});

/// Manufactured-solution run on a flat n = 3 slab: fixed-point iteration on
/// the closed-form source, compared against the exact solution.  The error
/// and truncation numbers feed the convergence-order study (two runs at
/// doubled resolution give the observed orders).
struct ManufacturedSolve {
    ManufacturedCase mms;
    IterationSettings settings;
    IterationResult iteration;
    double errorSup = 0.0;       ///< interior max |u_h - u*|
    double errorL2 = 0.0;        ///< volume-weighted rms of u_h - u*
    double truncationSup = 0.0;  ///< residual of u* under the discrete operator
    double truncationL2 = 0.0;
    CurvatureCheck curvature;
};
ManufacturedSolve solve_manufactured(const ChartGrid& grid, double amplitude,
                                     const SolverOptions& options = {});

}  // namespace conflab
