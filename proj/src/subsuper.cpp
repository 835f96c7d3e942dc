#include "conflab/subsuper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conflab/assemble.hpp"
#include "conflab/cg.hpp"
#include "conflab/errors.hpp"

namespace conflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smallest value of f over interior nodes.
template <typename F>
double interior_min(const ChartGrid& grid, F&& f) {
    double m = kInf;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        if (grid.isBoundaryNode(i)) continue;
        m = std::min(m, f(i));
    }
    return m;
}

template <typename F>
double interior_max(const ChartGrid& grid, F&& f) {
    double m = -kInf;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        if (grid.isBoundaryNode(i)) continue;
        m = std::max(m, f(i));
    }
    return m;
}

ScalarField scaled_field(const ScalarField& f, double s) {
    ScalarField out = f;
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= s;
    return out;
}

/// L u = -a Lap_g u + S_g u at interior nodes (zero at boundary entries).
ScalarField strong_form(const ConformalMetric& metric, const ScalarField& u) {
    ScalarField out = conformal_stiffness_apply(metric, u);
    const ScalarField& S = metric.scalarCurvature();
    for (std::int64_t i = 0; i < out.size(); ++i) {
        if (metric.grid().isBoundaryNode(i)) continue;
        out[i] += S[i] * u[i];
    }
    return out;
}

void require_positive_boundary(const BoundaryField& phi) {
    if (phi.size() == 0) fail_config("boundary data is empty; this solve needs a slab grid");
    if (phi.min() <= 0.0)
        fail_config("boundary data must be strictly positive (min = " +
                    std::to_string(phi.min()) + ")");
}

struct SpectralModes {
    SpectralResult robin;
    SpectralResult dirichlet;
    SignReport report;
};

SpectralModes compute_modes(const ConformalMetric& metric, double epsSign) {
    SpectralModes m;
    m.robin = first_eigenvalue_robin(metric);
    m.dirichlet = first_eigenvalue_dirichlet(metric);
    m.report = make_sign_report(m.robin, m.dirichlet, epsSign);
    if (!m.report.consistent)
        fail_numerical("eigenvalue classification is inconsistent (robin sign " +
                       std::to_string(m.report.robinSign) + ", Dirichlet sign " +
                       std::to_string(m.report.dirichletSign) + ")");
    return m;
}

[[noreturn]] void fail_pair_verification(const std::string& what, const PairCheck& check) {
    fail_numerical("the " + what +
                   " construction failed verification (sub defect " +
                   std::to_string(check.subDefect) + ", super defect " +
                   std::to_string(check.supDefect) + ", ordering gap " +
                   std::to_string(check.orderingGap) + ", tolerance " +
                   std::to_string(check.tolIneq) + ")");
}

void finish_pair(const ConformalMetric& metric, SubSuperPair& pair, const std::string& what) {
    pair.check = verify_pair(metric, pair);
    if (!pair.check.pass) fail_pair_verification(what, pair.check);
}

}  // namespace

double TargetCurvature::supAbs() const {
    return kind == Kind::Constant ? std::abs(value) : field.supAbs();
}

double inequality_scale(const ConformalMetric& metric, const SubSuperPair& pair) {
    const double upperMax = pair.upper.max();
    return operator_scale(metric) * (1.0 + upperMax) +
           pair.target.supAbs() * std::pow(1.0 + upperMax, metric.grid().constants().p - 1.0);
}

PairCheck verify_pair(const ConformalMetric& metric, const SubSuperPair& pair, double tolIneq) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;

    PairCheck check;
    check.tolIneq = tolIneq > 0.0 ? tolIneq : 1e-9 * inequality_scale(metric, pair);

    const ScalarField Llower = strong_form(metric, pair.lower);
    const ScalarField Lupper = strong_form(metric, pair.upper);

    check.subDefect = -kInf;
    check.supDefect = -kInf;
    check.orderingGap = kInf;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        check.orderingGap = std::min(check.orderingGap, pair.upper[i] - pair.lower[i]);
        if (grid.isBoundaryNode(i)) continue;
        const double t = pair.target.at(i);
        check.subDefect =
            std::max(check.subDefect, Llower[i] - t * std::pow(pair.lower[i], pm1));
        check.supDefect =
            std::max(check.supDefect, t * std::pow(pair.upper[i], pm1) - Lupper[i]);
    }

    check.lowerBoundaryExcess = -kInf;
    check.upperBoundaryShort = -kInf;
    for (std::int64_t b = 0; b < grid.boundaryNodeCount(); ++b) {
        const std::int64_t node = grid.boundaryToGrid(b);
        check.lowerBoundaryExcess =
            std::max(check.lowerBoundaryExcess, pair.lower[node] - pair.boundary[b]);
        check.upperBoundaryShort =
            std::max(check.upperBoundaryShort, pair.boundary[b] - pair.upper[node]);
    }

    check.minLower = pair.lower.min();
    check.pass = check.subDefect <= check.tolIneq && check.supDefect <= check.tolIneq &&
                 check.orderingGap >= -check.tolIneq &&
                 check.lowerBoundaryExcess <= check.tolIneq &&
                 check.upperBoundaryShort <= check.tolIneq && check.minLower > 0.0;
    return check;
}

ScalarField positive_linear_solve(const ConformalMetric& metric, double C,
                                  const BoundaryField& phi) {
    require_positive_boundary(phi);
    if (C < 0.0) fail_config("the auxiliary zeroth-order constant must be nonnegative");
    const ChartGrid& grid = metric.grid();

    AssembledOperator op = assemble_operator(metric, Closure::Dirichlet, false);

    // rhs = -couple * phi; couple holds the (negative) stiffness columns
    // against the boundary, so the rhs is nonnegative.
    std::vector<double> rhs(static_cast<std::size_t>(op.size()), 0.0);
    {
        std::vector<double> phiVec(phi.values.begin(), phi.values.end());
        std::vector<double> lift(static_cast<std::size_t>(op.size()), 0.0);
        op.couple.apply(phiVec, lift);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -lift[i];
    }

    double phiMean = 0.0;
    for (double v : phi.values) phiMean += v;
    phiMean /= static_cast<double>(phi.size());
    std::vector<double> x(static_cast<std::size_t>(op.size()), phiMean);

    CgResult cg = cg_solve_shifted(op.A, op.mass, C, rhs, x);
    if (!cg.converged)
        fail_numerical("the positive auxiliary solve did not converge (relative residual " +
                       std::to_string(cg.relResidual) + ")");

    ScalarField u(grid, 0.0);
    op.scatter(x, u);
    for (std::int64_t b = 0; b < grid.boundaryNodeCount(); ++b)
        u[grid.boundaryToGrid(b)] = phi[b];

    if (interior_min(grid, [&](std::int64_t i) { return u[i]; }) <= 0.0)
        fail_numerical("the positive auxiliary solve produced a nonpositive value; "
                       "the discrete comparison principle does not hold here");
    return u;
}

double choose_monotone_shift(const ConformalMetric& metric, const TargetCurvature& target,
                             double sMin, double sMax) {
    if (!(sMin >= 0.0) || !(sMax >= sMin))
        fail_config("monotone shift needs 0 <= sMin <= sMax");
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;
    const double pm2 = grid.constants().p - 2.0;
    const ScalarField& S = metric.scalarCurvature();

    // Need  -S_g(x) + t(x) (p-1) s^(p-2) + A > 0 on [sMin, sMax]; the middle
    // term is monotone in s, so the binding endpoint is sMin when t >= 0 and
    // sMax when t < 0.
    double required = -kInf;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        if (grid.isBoundaryNode(i)) continue;
        const double t = target.at(i);
        const double s = t >= 0.0 ? sMin : sMax;
        required = std::max(required, S[i] - t * pm1 * std::pow(s, pm2));
    }

    const double magnitude =
        std::max({1.0, interior_max(grid, [&](std::int64_t i) { return std::abs(S[i]); }),
                  target.supAbs() * pm1 * std::pow(std::max(sMax, std::abs(sMin)), pm2)});
    const double epsA = 1e-6 * magnitude;
    return std::max(0.0, required) + epsA;
}

namespace {

/// Linear-solve constant: dominates S_g on the interior, floored at a so the
/// flat slab keeps a fixed, reproducible auxiliary problem.
double linear_solve_constant(const ConformalMetric& metric, double safety) {
    const double supS = interior_max(metric.grid(), [&](std::int64_t i) {
        return std::abs(metric.scalarCurvature()[i]);
    });
    return std::max((1.0 + safety) * supS, metric.grid().constants().a);
}

ConstantConstruction build_constant_zero(const ConformalMetric& metric,
                                         const BoundaryField& phi, const SpectralModes& modes,
                                         double safety) {
    ConstantConstruction out;
    out.recipe = ConstantRecipe::ZeroEigenvalue;
    out.lambda = 0.0;
    out.classification = modes.report;

    const double C = linear_solve_constant(metric, safety);
    ScalarField lower = positive_linear_solve(metric, C, phi);

    const ScalarField& mode = modes.robin.mode;
    const double delta =
        (1.0 + safety) * std::max(lower.max() / mode.min(), phi.max() / mode.minBoundary());

    out.pair.lower = std::move(lower);
    out.pair.upper = scaled_field(mode, delta);
    out.pair.target = TargetCurvature::constant(0.0);
    out.pair.boundary = phi;
    out.constants = {{"C", C}, {"delta", delta}, {"etaRobin", modes.robin.value}};
    finish_pair(metric, out.pair, constant_recipe_name(out.recipe));
    return out;
}

ConstantConstruction build_constant_negative(const ConformalMetric& metric,
                                             const BoundaryField& phi,
                                             const SpectralModes& modes, double safety) {
    const ChartGrid& grid = metric.grid();
    const double pm2 = grid.constants().p - 2.0;
    const double pm1 = grid.constants().p - 1.0;
    const double eta = modes.robin.value;

    ConstantConstruction out;
    out.recipe = ConstantRecipe::NegativeEigenvalue;
    out.classification = modes.report;

    // Lower: a small multiple of the Robin mode, kept below the boundary data.
    const ScalarField& mode = modes.robin.mode;
    const double delta = (1.0 - safety) * phi.min() / mode.maxBoundary();
    ScalarField lower = scaled_field(mode, delta);

    // lambda = eta * min(lower) / max(lower)^(p-1): then eta * lower <=
    // lambda * lower^(p-1) holds pointwise (worst case at the max).
    const double lambda = eta * lower.min() / std::pow(lower.max(), pm1);
    out.lambda = lambda;

    const double minS = interior_min(
        grid, [&](std::int64_t i) { return metric.scalarCurvature()[i]; });
    double C = std::max(lower.max(), phi.max());
    if (minS < 0.0) C = std::max(C, std::pow(minS / lambda, 1.0 / pm2));
    C *= 1.0 + safety;

    out.pair.lower = std::move(lower);
    out.pair.upper = ScalarField(grid, C);
    out.pair.target = TargetCurvature::constant(lambda);
    out.pair.boundary = phi;
    out.constants = {{"delta", delta}, {"C", C}, {"lambda", lambda}, {"etaRobin", eta}};
    finish_pair(metric, out.pair, constant_recipe_name(out.recipe));
    return out;
}

ConstantConstruction build_constant_positive(const ConformalMetric& metric,
                                             const BoundaryField& phi,
                                             const SpectralModes& modes, double safety) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;
    const double eta = modes.robin.value;

    ConstantConstruction out;
    out.recipe = ConstantRecipe::PositiveEigenvalue;
    out.classification = modes.report;

    const double C = linear_solve_constant(metric, safety);
    ScalarField lower = positive_linear_solve(metric, C, phi);

    const ScalarField& mode = modes.robin.mode;
    const double delta =
        (1.0 + safety) * std::max(lower.max() / mode.min(), phi.max() / mode.minBoundary());
    ScalarField upper = scaled_field(mode, delta);

    // lambda = eta * min(upper) / max(upper)^(p-1) keeps eta * upper >=
    // lambda * upper^(p-1) pointwise; the lower inequality only needs
    // lambda >= 0.
    const double lambda = eta * upper.min() / std::pow(upper.max(), pm1);
    out.lambda = lambda;

    out.pair.lower = std::move(lower);
    out.pair.upper = std::move(upper);
    out.pair.target = TargetCurvature::constant(lambda);
    out.pair.boundary = phi;
    out.constants = {{"C", C}, {"delta", delta}, {"lambda", lambda}, {"etaRobin", eta}};
    finish_pair(metric, out.pair, constant_recipe_name(out.recipe));
    return out;
}

ConstantConstruction build_constant_positive_curvature(const ConformalMetric& metric,
                                                       const BoundaryField& phi,
                                                       const SpectralModes& modes,
                                                       double safety) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;

    if (metric.scalarCurvature().min() <= 0.0)
        fail_unsupported("the positive-curvature strategy requires the scalar curvature of "
                         "the background metric to be positive everywhere (min = " +
                         std::to_string(metric.scalarCurvature().min()) + ")");
    if (modes.dirichlet.value <= 0.0)
        fail_numerical("positive scalar curvature did not produce a positive first "
                       "Dirichlet eigenvalue");

    ConstantConstruction out;
    out.recipe = ConstantRecipe::PositiveCurvatureAlt;
    out.classification = modes.report;

    const double C = linear_solve_constant(metric, safety);
    ScalarField lower = positive_linear_solve(metric, C, phi);

    // Upper: first Dirichlet mode lifted by a constant exceeding both the
    // boundary data and the lower solution.
    const double lift = (1.0 + safety) * std::max(phi.max(), lower.max());
    ScalarField upper = modes.dirichlet.mode;
    for (std::int64_t i = 0; i < upper.size(); ++i) upper[i] += lift;

    const double minSInterior = interior_min(
        grid, [&](std::int64_t i) { return metric.scalarCurvature()[i]; });
    const double lambda =
        (1.0 - safety) * lift * minSInterior / std::pow(upper.max(), pm1);
    out.lambda = lambda;

    out.pair.lower = std::move(lower);
    out.pair.upper = std::move(upper);
    out.pair.target = TargetCurvature::constant(lambda);
    out.pair.boundary = phi;
    out.constants = {{"C", C},
                     {"lift", lift},
                     {"lambda", lambda},
                     {"etaDirichlet", modes.dirichlet.value}};
    finish_pair(metric, out.pair, constant_recipe_name(out.recipe));
    return out;
}

}  // namespace

ConstantConstruction build_constant_curvature_pair(const ConformalMetric& metric,
                                                   const BoundaryField& phi,
                                                   ConstantStrategy strategy, double epsSign,
                                                   double safety) {
    require_positive_boundary(phi);
    SpectralModes modes = compute_modes(metric, epsSign);

    if (strategy == ConstantStrategy::PositiveCurvature)
        return build_constant_positive_curvature(metric, phi, modes, safety);

    switch (modes.report.robinSign) {
    case 0: return build_constant_zero(metric, phi, modes, safety);
    case -1: return build_constant_negative(metric, phi, modes, safety);
    default: return build_constant_positive(metric, phi, modes, safety);
    }
}

const char* constant_recipe_name(ConstantRecipe r) {
    switch (r) {
    case ConstantRecipe::ZeroEigenvalue: return "zero-eigenvalue";
    case ConstantRecipe::NegativeEigenvalue: return "negative-eigenvalue";
    case ConstantRecipe::PositiveEigenvalue: return "positive-eigenvalue";
    case ConstantRecipe::PositiveCurvatureAlt: return "positive-curvature-alt";
    }
    return "?";
}

const char* recipe_name(PrescribedRecipe r) {
    switch (r) {
    case PrescribedRecipe::NegativeEverywhere: return "negative-everywhere";
    case PrescribedRecipe::DelegateConstantZero: return "zero-target";
    case PrescribedRecipe::ZeroNegativeEverywhere: return "zero-negative-everywhere";
    case PrescribedRecipe::ZeroNegativeNearBoundary: return "zero-negative-near-boundary";
    case PrescribedRecipe::PositiveTargetPositive: return "positive-target-positive";
    case PrescribedRecipe::PositiveTargetMixed: return "positive-target-mixed";
    case PrescribedRecipe::PositiveTargetNonpositive: return "positive-target-nonpositive";
    }
    return "?";
}

namespace {

/// Width (in whole z-levels) of the closed boundary band on which S < 0;
/// 0 when S >= 0 somewhere on the faces themselves.
int negative_band_levels(const ChartGrid& grid, const ScalarField& S) {
    const int zCount = grid.shape().back();
    int firstFail = zCount;  // smallest level holding a node with S >= 0
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        if (S[i] < 0.0) continue;
        const int zi = static_cast<int>(i % zCount);
        firstFail = std::min(firstFail, std::min(zi, zCount - 1 - zi));
        if (firstFail == 0) break;
    }
    return firstFail;
}

}  // namespace

PrescribedDispatch choose_prescribed_recipe(const ConformalMetric& metric,
                                            const SignReport& classification,
                                            const ScalarField& S, std::optional<double> gamma) {
    const ChartGrid& grid = metric.grid();
    const double maxS = S.max();
    const double minS = S.min();

    if (classification.robinSign < 0) {
        if (maxS < 0.0) return {PrescribedRecipe::NegativeEverywhere};
        fail_unsupported("a negative first Robin eigenvalue asks for a prescribed curvature "
                         "that is negative everywhere; here max S = " +
                         std::to_string(maxS));
    }

    if (classification.robinSign > 0) {
        if (minS > 0.0) return {PrescribedRecipe::PositiveTargetPositive};
        if (maxS > 0.0) return {PrescribedRecipe::PositiveTargetMixed};
        return {PrescribedRecipe::PositiveTargetNonpositive};
    }

    // Zero band.
    if (S.supAbs() == 0.0) return {PrescribedRecipe::DelegateConstantZero};
    if (maxS < 0.0) return {PrescribedRecipe::ZeroNegativeEverywhere};

    const double hz = grid.spacing().back();
    const int bandAvailable = negative_band_levels(grid, S);
    if (gamma.has_value()) {
        if (*gamma <= 0.0) fail_config("the boundary band width must be positive");
        const int bandLevels = static_cast<int>(std::floor(*gamma / hz + 0.5));
        if (bandLevels < 1)
            fail_config("the boundary band width " + std::to_string(*gamma) +
                        " is below one grid layer (" + std::to_string(hz) + ")");
        if (bandLevels >= bandAvailable)
            fail_unsupported("the prescribed curvature must be negative on the closed "
                             "boundary band of the requested width " +
                             std::to_string(*gamma) + "; it reaches a nonnegative value " +
                             std::to_string(bandAvailable) + " layer(s) from the faces");
        return {PrescribedRecipe::ZeroNegativeNearBoundary,
                static_cast<double>(bandLevels) * hz};
    }
    if (bandAvailable >= 2)
        return {PrescribedRecipe::ZeroNegativeNearBoundary,
                static_cast<double>(bandAvailable - 1) * hz};
    fail_unsupported("a zero first Robin eigenvalue with a nonzero prescribed curvature "
                     "needs S < 0 at least on a neighborhood of the boundary; here S is "
                     "nonnegative somewhere " +
                     std::string(bandAvailable == 0 ? "on the faces themselves"
                                                   : "in the first interior layer"));
}

namespace {

PrescribedConstruction build_prescribed_negative(const ConformalMetric& metric,
                                                 const BoundaryField& phi, const ScalarField& S,
                                                 const SpectralModes& modes, double safety) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;
    const double pm2 = grid.constants().p - 2.0;
    const double eta = modes.robin.value;
    const ScalarField& mode = modes.robin.mode;

    PrescribedConstruction out;
    out.recipe = PrescribedRecipe::NegativeEverywhere;
    out.classification = modes.report;

    // Pointwise constraint eta * mode <= delta^(p-2) S mode^(p-1): both sides
    // negative, so it caps delta from above.
    const double ratio = interior_min(grid, [&](std::int64_t i) {
        return eta * mode[i] / (S[i] * std::pow(mode[i], pm1));
    });
    const double delta = (1.0 - safety) *
                         std::min(std::pow(ratio, 1.0 / pm2), phi.min() / mode.maxBoundary());
    ScalarField lower = scaled_field(mode, delta);

    // Constant upper: S_g >= S C^(p-2) where S_g < 0 caps C from below.
    const ScalarField& Sg = metric.scalarCurvature();
    double C = std::max(lower.max(), phi.max());
    const double capC = interior_max(grid, [&](std::int64_t i) {
        return Sg[i] < 0.0 ? std::pow(Sg[i] / S[i], 1.0 / pm2) : 0.0;
    });
    C = (1.0 + safety) * std::max(C, capC);

    out.pair.lower = std::move(lower);
    out.pair.upper = ScalarField(grid, C);
    out.pair.target = TargetCurvature::prescribed(S);
    out.pair.boundary = phi;
    out.constants = {{"delta", delta}, {"C", C}, {"etaRobin", eta}};
    finish_pair(metric, out.pair, recipe_name(out.recipe));
    return out;
}

PrescribedConstruction build_prescribed_zero_negative(const ConformalMetric& metric,
                                                      const BoundaryField& phi,
                                                      const ScalarField& S,
                                                      const SpectralModes& modes,
                                                      double safety) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;
    const double pm2 = grid.constants().p - 2.0;
    const ScalarField& mode = modes.robin.mode;
    const ScalarField& Sg = metric.scalarCurvature();

    PrescribedConstruction out;
    out.recipe = PrescribedRecipe::ZeroNegativeEverywhere;
    out.classification = modes.report;

    // Upper: a Robin-mode multiple dominating the boundary data; its defect
    // against the strictly negative S is verified below.
    const double deltaUpper = (1.0 + safety) * phi.max() / mode.minBoundary();
    ScalarField upper = scaled_field(mode, deltaUpper);

    // Lower: scaled auxiliary solve; the scan caps the scale so that
    // (C - S_g) v >= delta^(p-2) (-S) v^(p-1) pointwise.
    const double C = linear_solve_constant(metric, safety);
    ScalarField v = positive_linear_solve(metric, C, phi);
    const double scan = interior_min(grid, [&](std::int64_t i) {
        return (C - Sg[i]) * v[i] / ((-S[i]) * std::pow(v[i], pm1));
    });
    double delta = std::min(std::pow(scan, 1.0 / pm2), 1.0);
    delta = std::min(delta, interior_min(grid, [&](std::int64_t i) {
        return upper[i] / v[i];
    }));
    for (std::int64_t b = 0; b < grid.boundaryNodeCount(); ++b) {
        const std::int64_t node = grid.boundaryToGrid(b);
        delta = std::min(delta, upper[node] / v[node]);
    }
    delta *= 1.0 - safety;

    out.pair.lower = scaled_field(v, delta);
    out.pair.upper = std::move(upper);
    out.pair.target = TargetCurvature::prescribed(S);
    out.pair.boundary = phi;
    out.constants = {{"deltaUpper", deltaUpper}, {"C", C}, {"deltaLower", delta}};
    finish_pair(metric, out.pair, recipe_name(out.recipe));
    return out;
}

PrescribedConstruction build_prescribed_positive(const ConformalMetric& metric,
                                                 const BoundaryField& phi, const ScalarField& S,
                                                 const SpectralModes& modes,
                                                 PrescribedRecipe recipe, double safety) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;
    const double pm2 = grid.constants().p - 2.0;
    const double eta = modes.robin.value;
    const ScalarField& mode = modes.robin.mode;
    const ScalarField& Sg = metric.scalarCurvature();

    PrescribedConstruction out;
    out.recipe = recipe;
    out.classification = modes.report;

    // Upper: eta * mode >= delta^(p-2) S mode^(p-1) binds only where S > 0.
    double deltaUpper;
    const double scanUpper = interior_min(grid, [&](std::int64_t i) {
        return S[i] > 0.0 ? eta * mode[i] / (S[i] * std::pow(mode[i], pm1)) : kInf;
    });
    if (scanUpper < kInf) {
        deltaUpper = (1.0 - safety) * std::pow(scanUpper, 1.0 / pm2);
    } else {
        // S <= 0 on the interior: any multiple dominating the boundary works.
        deltaUpper = (1.0 + safety) * phi.max() / mode.minBoundary();
    }
    ScalarField upper = scaled_field(mode, deltaUpper);

    // Boundary rescale c: the largest multiple of phi the upper still
    // dominates on the faces (c = 1 for the nonpositive-target recipe).
    double c = 1.0;
    if (recipe != PrescribedRecipe::PositiveTargetNonpositive)
        c = deltaUpper * mode.minBoundary() / phi.max();
    BoundaryField boundary = phi;
    for (std::int64_t b = 0; b < boundary.size(); ++b) boundary[b] *= c;

    const double C = linear_solve_constant(metric, safety);
    ScalarField v = positive_linear_solve(metric, C, boundary);

    // Lower scale: the defect scan binds only where S < 0; ordering and the
    // boundary cap always apply.
    double delta = std::min(1.0, interior_min(grid, [&](std::int64_t i) {
        return S[i] < 0.0
                   ? std::pow((C - Sg[i]) * v[i] / ((-S[i]) * std::pow(v[i], pm1)), 1.0 / pm2)
                   : kInf;
    }));
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i)
        delta = std::min(delta, upper[i] / v[i]);
    delta *= 1.0 - safety;

    out.pair.lower = scaled_field(v, delta);
    out.pair.upper = std::move(upper);
    out.pair.target = TargetCurvature::prescribed(S);
    out.pair.boundary = std::move(boundary);
    out.boundaryScale = c;
    out.constants = {
        {"deltaUpper", deltaUpper}, {"c", c}, {"C", C}, {"deltaLower", delta}, {"etaRobin", eta}};
    finish_pair(metric, out.pair, recipe_name(out.recipe));
    return out;
}

}  // namespace

PrescribedConstruction build_prescribed_curvature_pair(const ConformalMetric& metric,
                                                       const BoundaryField& phi,
                                                       const ScalarField& S,
                                                       PrescribedRecipe recipe,
                                                       const SignReport& classification,
                                                       double safety) {
    require_positive_boundary(phi);
    SpectralModes modes = compute_modes(metric, classification.epsSign);

    switch (recipe) {
    case PrescribedRecipe::NegativeEverywhere:
        return build_prescribed_negative(metric, phi, S, modes, safety);
    case PrescribedRecipe::DelegateConstantZero: {
        ConstantConstruction base =
            build_constant_curvature_pair(metric, phi, ConstantStrategy::Auto,
                                          classification.epsSign, safety);
        PrescribedConstruction out;
        out.recipe = PrescribedRecipe::DelegateConstantZero;
        out.pair = std::move(base.pair);
        out.classification = base.classification;
        out.constants = std::move(base.constants);
        return out;
    }
    case PrescribedRecipe::ZeroNegativeEverywhere:
        return build_prescribed_zero_negative(metric, phi, S, modes, safety);
    case PrescribedRecipe::ZeroNegativeNearBoundary:
        fail_config("the near-boundary recipe runs through the two-stage flow, not the "
                    "direct constructions");
    case PrescribedRecipe::PositiveTargetPositive:
    case PrescribedRecipe::PositiveTargetMixed:
    case PrescribedRecipe::PositiveTargetNonpositive:
        return build_prescribed_positive(metric, phi, S, modes, recipe, safety);
    }
    fail_config("unknown prescribed-curvature recipe");
}

TwoStageConstruction build_two_stage_pair(const ConformalMetric& g1, const BoundaryField& phi,
                                          const ScalarField& S, double gamma,
                                          double etaTildeDirichlet,
                                          const ScalarField& dirichletMode, double safety) {
    require_positive_boundary(phi);
    const ChartGrid& grid = g1.grid();
    const double pm1 = grid.constants().p - 1.0;
    const double pm2 = grid.constants().p - 2.0;
    if (etaTildeDirichlet <= 0.0)
        fail_numerical("the flattened metric lost its positive first Dirichlet eigenvalue");

    TwoStageConstruction out;

    // Upper base: Dirichlet mode plus a constant dominating the boundary data.
    const double K = (1.0 + safety) * phi.max();
    ScalarField upper = dirichletMode;
    for (std::int64_t i = 0; i < upper.size(); ++i) upper[i] += K;

    // K1: smallest mode value strictly outside the band where S < 0; that is
    // where the super-solution inequality needs the eigenvalue term.
    const int zCount = grid.shape().back();
    const double hz = grid.spacing().back();
    const int bandLevels = static_cast<int>(std::floor(gamma / hz + 0.5));
    double K1 = kInf;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        const int zi = static_cast<int>(i % zCount);
        if (std::min(zi, zCount - 1 - zi) <= bandLevels) continue;
        K1 = std::min(K1, dirichletMode[i]);
    }

    const double maxS = S.max();
    double beta = kInf;
    if (maxS > 0.0) {
        if (!(K1 < kInf))
            fail_numerical("the negative band covers the whole slab yet max S > 0");
        beta = etaTildeDirichlet * K1 / (maxS * std::pow(upper.max(), pm1));
    }

    // Lower: scaled auxiliary solve under g1; the scan caps beta where S < 0.
    const double C = grid.constants().a;
    ScalarField v = positive_linear_solve(g1, C, phi);
    const double deltaLower = (1.0 - safety) * std::min(1.0, K / v.max());
    ScalarField lower = scaled_field(v, deltaLower);

    const ScalarField& Sg1 = g1.scalarCurvature();
    const double betaSub = interior_min(grid, [&](std::int64_t i) {
        return S[i] < 0.0 ? (C - Sg1[i]) / ((-S[i]) * std::pow(lower[i], pm2)) : kInf;
    });
    beta = std::min(beta, betaSub);
    if (!(beta > 0.0 && beta < kInf))
        fail_numerical("the two-stage scaling constant came out nonpositive or unbounded");
    beta *= 1.0 - safety;

    ScalarField target = S;
    for (std::int64_t i = 0; i < target.size(); ++i) target[i] *= beta;

    out.pair.lower = std::move(lower);
    out.pair.upper = std::move(upper);
    out.pair.target = TargetCurvature::prescribed(std::move(target));
    out.pair.boundary = phi;
    out.beta = beta;
    out.rescale = std::pow(beta, 1.0 / pm2);
    out.K = K;
    out.K1 = K1 < kInf ? K1 : 0.0;
    out.constants = {{"K", K},
                     {"K1", out.K1},
                     {"beta", beta},
                     {"c", out.rescale},
                     {"C", C},
                     {"deltaLower", deltaLower},
                     {"gamma", gamma},
                     {"etaDirichlet", etaTildeDirichlet}};
    finish_pair(g1, out.pair, "two-stage");
    return out;
}

}  // namespace conflab
