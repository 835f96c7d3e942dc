#pragma once

#include "conflab/iteration.hpp"
#include "conflab/metric.hpp"
#include "conflab/subsuper.hpp"

namespace conflab {

/// Scalar curvature of the solution metric u^(p-2) g, evaluated as the
/// curvature field of the rescaled metric.  By the exact discrete covariance
/// this equals u^(1-p) (-a Lap_g u + S_g u) at interior nodes; boundary
/// entries use the one-sided normal stencil and are flagged extrapolated.
ScalarField scalar_curvature_of_solution(const ConformalMetric& metric, const ScalarField& u);

/// Round trip: recompute the curvature of the solution metric and compare to
/// the target.  The pointwise identity pins the deviation to
/// residual * u^(1-p), so the default bound is 10 * tolResidual / min(u)^(p-1)
/// (the factor absorbs the different floating summation orders of the two
/// evaluation routes).
struct CurvatureCheck {
    ScalarField recomputed;
    double deviationSup = 0.0;  ///< interior max |recomputed - target|
    double deviationL2 = 0.0;   ///< rms weighted by the solution metric volume
    double boundarySup = 0.0;   ///< max |u - data| on the faces
    double tolSup = 0.0;
    double tolBoundary = 0.0;
    bool pass = false;
};
CurvatureCheck check_curvature(const ConformalMetric& metric, const ScalarField& u,
                               const TargetCurvature& target, const BoundaryField& data,
                               double tolResidual);

/// How boundary data is produced from a boundary conformal factor.
///   PowerFactor  data^((n+1)(n-2) / (4(n-3))), the trace exponent; n >= 4 only
///   LogFactor    exp(data * (n-2)/2), the n = 3 form (valid for any n)
enum class BoundaryMapKind { PowerFactor, LogFactor };
BoundaryField boundary_data_from_factor(const ChartGrid& grid, BoundaryMapKind kind,
                                        const BoundaryField& data);

/// Manufactured flat-slab case (n = 3): exact solution
///   u* = 1 + amplitude sin(2 pi x / L1) sin(2 pi y / L2) * 4 z (L - z) / L^2
/// with the source S* = -a Lap u* / u*^(p-1) in closed form, boundary data 1.
/// The amplitude must be small enough that the fixed-point map contracts;
/// (0, 0.05] is enforced.
struct ManufacturedCase {
    ScalarField exact;
    ScalarField source;
    BoundaryField boundary;
    double rangeMin = 0.0;
    double rangeMax = 0.0;
    double amplitude = 0.0;
};
ManufacturedCase manufactured_solution_case(const ChartGrid& grid, double amplitude);

/// Closed-torus pairing identity for the unit-potential operator -a Lap + 1:
/// with S induced by a positive factor u through S = u^(1-p) (-a Lap u + u),
///   sum_j M_j S_j u_j^p  =  u'Ku + u'Mu  >  0,
/// exactly in real arithmetic, so S must be positive somewhere: no metric in
/// this discrete class has everywhere-nonpositive curvature.
struct ObstructionReport {
    double lhs = 0.0;     ///< u'Ku + u'Mu
    double rhs = 0.0;     ///< sum_j M_j S_j u_j^p
    double relGap = 0.0;
    double maxS = 0.0;
    ScalarField inducedS;
    bool identityHolds = false;  ///< relGap <= 1e-10
    bool obstructed = false;     ///< maxS > 0
};
ObstructionReport closed_torus_obstruction_check(const ChartGrid& torus, const ScalarField& u);

}  // namespace conflab
