#pragma once

#include <map>
#include <optional>
#include <string>

#include "conflab/field.hpp"
#include "conflab/metric.hpp"
#include "conflab/spectral.hpp"

namespace conflab {

/// Right-hand side of the curvature equation: a constant or a field.
struct TargetCurvature {
    enum class Kind { Constant, Prescribed };
    Kind kind = Kind::Constant;
    double value = 0.0;
    ScalarField field;

    static TargetCurvature constant(double v) {
        TargetCurvature t;
        t.kind = Kind::Constant;
        t.value = v;
        return t;
    }
    static TargetCurvature prescribed(ScalarField f) {
        TargetCurvature t;
        t.kind = Kind::Prescribed;
        t.field = std::move(f);
        return t;
    }

    double at(std::int64_t node) const {
        return kind == Kind::Constant ? value : field[node];
    }
    double minValue() const { return kind == Kind::Constant ? value : field.min(); }
    double maxValue() const { return kind == Kind::Constant ? value : field.max(); }
    double supAbs() const;
};

/// Nodewise verification results for an ordered sub/super pair.
struct PairCheck {
    double subDefect = 0.0;       ///< max positive part of L(lower) - t lower^(p-1)
    double supDefect = 0.0;       ///< max positive part of t upper^(p-1) - L(upper)
    double orderingGap = 0.0;     ///< min(upper - lower), must be >= 0
    double lowerBoundaryExcess = 0.0;  ///< max(lower - phi) on the boundary
    double upperBoundaryShort = 0.0;   ///< max(phi - upper) on the boundary
    double minLower = 0.0;
    double tolIneq = 0.0;
    bool pass = false;
};

/// Ordered pair 0 <= lower <= upper bracketing a solution of
/// -a Lap_g u + S_g u = t u^(p-1), u = boundary on the faces.
struct SubSuperPair {
    ScalarField lower;
    ScalarField upper;
    TargetCurvature target;
    BoundaryField boundary;
    PairCheck check;
};

/// Evaluate the two defect inequalities with the same discrete operator the
/// iteration uses.  tolIneq <= 0 picks the default 1e-9 * inequality scale.
PairCheck verify_pair(const ConformalMetric& metric, const SubSuperPair& pair,
                      double tolIneq = 0.0);

/// Absolute tolerance the pair inequalities are held to.
double inequality_scale(const ConformalMetric& metric, const SubSuperPair& pair);

/// Solve (-a Lap_g + C) u = 0 with u = phi > 0 on the boundary, C >= 0.
/// The operator is an M-matrix, so the solution is strictly positive; that is
/// asserted, not assumed.
ScalarField positive_linear_solve(const ConformalMetric& metric, double C,
                                  const BoundaryField& phi);

/// Smallest admissible linearization shift: A such that
///   -S_g(x) + t(x) (p-1) s^(p-2) + A > 0 for all x and s in [sMin, sMax],
/// plus the margin epsA = 1e-6 * scale.  Monotone in s, so the endpoint scan
/// is exact.
double choose_monotone_shift(const ConformalMetric& metric, const TargetCurvature& target,
                             double sMin, double sMax);

enum class ConstantRecipe {
    ZeroEigenvalue,       ///< eta_1 in the zero band, lambda = 0
    NegativeEigenvalue,   ///< eta_1 < 0, lambda < 0
    PositiveEigenvalue,   ///< eta_1 > 0, lambda > 0
    PositiveCurvatureAlt  ///< S_g > 0 everywhere, lambda > 0 via Dirichlet mode
};

enum class ConstantStrategy { Auto, PositiveCurvature };

const char* constant_recipe_name(ConstantRecipe r);

struct ConstantConstruction {
    ConstantRecipe recipe = ConstantRecipe::ZeroEigenvalue;
    SubSuperPair pair;
    double lambda = 0.0;
    SignReport classification;
    std::map<std::string, double> constants;  ///< named choices for the report
};

/// Sub/super pair for the constant-curvature problem, dispatched on the sign
/// of the first Robin eigenvalue (or the everywhere-positive-curvature
/// alternative when requested).  Boundary data must be strictly positive.
/// The emitted pair has passed verify_pair.
ConstantConstruction build_constant_curvature_pair(const ConformalMetric& metric,
                                                   const BoundaryField& phi,
                                                   ConstantStrategy strategy = ConstantStrategy::Auto,
                                                   double epsSign = 0.0,
                                                   double safety = 0.1);

enum class PrescribedRecipe {
    NegativeEverywhere,        ///< eta_1 < 0, S < 0 everywhere
    DelegateConstantZero,      ///< eta_1 = 0, S identically 0
    ZeroNegativeEverywhere,    ///< eta_1 = 0, S < 0 everywhere
    ZeroNegativeNearBoundary,  ///< eta_1 = 0, S < 0 on a boundary band: two-stage flow
    PositiveTargetPositive,    ///< eta_1 > 0, S > 0 everywhere (boundary c phi)
    PositiveTargetMixed,       ///< eta_1 > 0, S > 0 somewhere (boundary c phi)
    PositiveTargetNonpositive  ///< eta_1 > 0, S <= 0 everywhere (c = 1)
};

const char* recipe_name(PrescribedRecipe r);

/// Dispatch on the classification and the sign pattern of S.  Combinations no
/// construction covers raise Unsupported and name the missing hypothesis.
/// For the two-stage recipe, resolves gamma: validates a given width, or finds
/// the widest band with S < 0 when none is given.
struct PrescribedDispatch {
    PrescribedRecipe recipe;
    double gamma = 0.0;  ///< two-stage only
};
PrescribedDispatch choose_prescribed_recipe(const ConformalMetric& metric,
                                            const SignReport& classification,
                                            const ScalarField& S,
                                            std::optional<double> gamma);

struct PrescribedConstruction {
    PrescribedRecipe recipe;
    SubSuperPair pair;
    double boundaryScale = 1.0;  ///< c; the pair's boundary data is c * phi
    SignReport classification;
    std::map<std::string, double> constants;
};

/// Pair for the prescribed-curvature problem, direct recipes only (the
/// two-stage recipe needs the flattening solve first; see the pipeline).
PrescribedConstruction build_prescribed_curvature_pair(const ConformalMetric& metric,
                                                       const BoundaryField& phi,
                                                       const ScalarField& S,
                                                       PrescribedRecipe recipe,
                                                       const SignReport& classification,
                                                       double safety = 0.1);

/// Stage-two pair of the zero-eigenvalue flow: under the flattened metric g1
/// (curvature at solver-residual level), with its first Dirichlet pair
/// (etaTilde, dirichletMode), bracket a solution of the beta-scaled problem.
/// beta satisfies both the super-solution bound through
/// K1 = min of the Dirichlet mode outside the band and the sub-solution scan;
/// the returned target is beta * S and the final composed solution must be
/// rescaled by c = beta^(1/(p-2)).
struct TwoStageConstruction {
    SubSuperPair pair;
    double beta = 0.0;
    double rescale = 0.0;  ///< c = beta^(1/(p-2))
    double K = 0.0;
    double K1 = 0.0;
    std::map<std::string, double> constants;
};
TwoStageConstruction build_two_stage_pair(const ConformalMetric& g1, const BoundaryField& phi,
                                          const ScalarField& S, double gamma,
                                          double etaTildeDirichlet,
                                          const ScalarField& dirichletMode,
                                          double safety = 0.1);

}  // namespace conflab
