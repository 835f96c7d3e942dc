#include "conflab/pipeline.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "conflab/errors.hpp"
#include "conflab/spectral.hpp"

namespace conflab {

namespace {

CurvatureCheck check_or_fail(const ConformalMetric& metric, const ScalarField& u,
                             const TargetCurvature& target, const BoundaryField& data,
                             double tolResidual) {
    CurvatureCheck check = check_curvature(metric, u, target, data, tolResidual);
    if (!check.pass) {
        std::ostringstream msg;
        msg << "curvature round trip failed: interior deviation " << check.deviationSup
            << " (allowed " << check.tolSup << "), boundary deviation " << check.boundarySup
            << " (allowed " << check.tolBoundary << ")";
        fail_numerical(msg.str());
    }
    return check;
}

double interior_sup_abs(const ChartGrid& grid, const ScalarField& f) {
    double sup = 0.0;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        if (grid.isBoundaryNode(i)) continue;
        sup = std::max(sup, std::abs(f[i]));
    }
    return sup;
}

PrescribedSolve run_two_stage(const ConformalMetric& metric, const BoundaryField& phi,
                              const ScalarField& S, const SignReport& classification,
                              double gamma, const SolverOptions& options) {
    const ChartGrid& grid = metric.grid();
    const double pm1 = grid.constants().p - 1.0;

    PrescribedSolve out;
    out.classification = classification;
    out.dispatch = {PrescribedRecipe::ZeroNegativeNearBoundary, gamma};

    // Stage one: deform to curvature zero with unit boundary data, at a
    // tenth of the requested residual so the flattened curvature really sits
    // at solver level.
    SolverOptions flattenOptions = options;
    flattenOptions.relResidual = 0.1 * options.relResidual;
    flattenOptions.gamma.reset();
    flattenOptions.strategy = ConstantStrategy::Auto;
    out.flatten = solve_constant(metric, BoundaryField(grid, 1.0), flattenOptions);
    const ScalarField& v = out.flatten->solution;

    const ConformalMetric g1 = metric.rescaled(v);
    const SpectralResult dirichlet = first_eigenvalue_dirichlet(g1);

    TwoStageConstruction ts =
        build_two_stage_pair(g1, phi, S, gamma, dirichlet.value, dirichlet.mode, options.safety);
    out.pair = ts.pair;
    out.beta = ts.beta;
    out.boundaryScale = ts.rescale;
    out.constants = std::move(ts.constants);
    out.constants["gamma"] = gamma;
    out.constants["flattenedDirichletValue"] = dirichlet.value;
    out.constants["flattenedCurvatureSup"] = interior_sup_abs(grid, g1.scalarCurvature());

    out.settings = make_iteration_settings(g1, out.pair, options.relResidual, options.maxSteps);
    out.iteration = iterate_monotone(g1, out.pair, out.settings);
    const ScalarField& w = out.iteration.solution;

    // Compose back: w solves the beta-scaled problem under g1 = v^(p-2) g, so
    // c w v with c = beta^(1/(p-2)) solves the original under g, exactly by
    // the covariance of the discrete operator.  The composed residual picks up
    // the factor c v^(p-1).
    out.solution = ScalarField(grid);
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i)
        out.solution[i] = ts.rescale * (w[i] * v[i]);
    out.boundary = BoundaryField(grid);
    for (std::int64_t b = 0; b < out.boundary.size(); ++b)
        out.boundary[b] = ts.rescale * phi[b];

    const double tolComposed =
        ts.rescale * std::pow(v.max(), pm1) * out.settings.tolResidual;
    out.constants["composedResidualTol"] = tolComposed;
    out.curvature = check_or_fail(metric, out.solution, TargetCurvature::prescribed(S),
                                  out.boundary, tolComposed);
    return out;
}

}  // namespace

ConstantSolve solve_constant(const ConformalMetric& metric, const BoundaryField& phi,
                             const SolverOptions& options) {
    ConstantConstruction construction = build_constant_curvature_pair(
        metric, phi, options.strategy, options.epsSign, options.safety);

    ConstantSolve out;
    out.classification = construction.classification;
    out.recipe = construction.recipe;
    out.lambda = construction.lambda;
    out.pair = std::move(construction.pair);
    out.constants = std::move(construction.constants);
    out.settings = make_iteration_settings(metric, out.pair, options.relResidual,
                                           options.maxSteps);
    out.iteration = iterate_monotone(metric, out.pair, out.settings);
    out.solution = out.iteration.solution;
    out.boundary = out.pair.boundary;
    out.curvature = check_or_fail(metric, out.solution, out.pair.target, out.boundary,
                                  out.settings.tolResidual);
    return out;
}

PrescribedSolve solve_prescribed(const ConformalMetric& metric, const BoundaryField& phi,
                                 const ScalarField& S, const SolverOptions& options) {
    if (!metric.grid().sameLayout(*S.grid))
        fail_config("prescribed curvature field lives on a different grid");
    const SignReport classification = classify(metric, options.epsSign);
    const PrescribedDispatch dispatch =
        choose_prescribed_recipe(metric, classification, S, options.gamma);

    if (dispatch.recipe == PrescribedRecipe::ZeroNegativeNearBoundary)
        return run_two_stage(metric, phi, S, classification, dispatch.gamma, options);

    PrescribedConstruction construction =
        build_prescribed_curvature_pair(metric, phi, S, dispatch.recipe, classification,
                                        options.safety);

    PrescribedSolve out;
    out.classification = classification;
    out.dispatch = dispatch;
    out.pair = std::move(construction.pair);
    out.boundaryScale = construction.boundaryScale;
    out.constants = std::move(construction.constants);
    out.settings = make_iteration_settings(metric, out.pair, options.relResidual,
                                           options.maxSteps);
    out.iteration = iterate_monotone(metric, out.pair, out.settings);
    out.solution = out.iteration.solution;
    out.boundary = out.pair.boundary;
    out.curvature = check_or_fail(metric, out.solution, out.pair.target, out.boundary,
                                  out.settings.tolResidual);
    return out;
}

PrescribedSolve solve_two_stage(const ConformalMetric& metric, const BoundaryField& phi,
                                const ScalarField& S, const SolverOptions& options) {
    if (!metric.grid().sameLayout(*S.grid))
        fail_config("prescribed curvature field lives on a different grid");
    const SignReport classification = classify(metric, options.epsSign);
    const PrescribedDispatch dispatch =
        choose_prescribed_recipe(metric, classification, S, options.gamma);
    if (dispatch.recipe != PrescribedRecipe::ZeroNegativeNearBoundary)
        fail_unsupported(std::string("the two-stage flow covers a zero first eigenvalue with "
                                     "S negative near the boundary only; this problem "
                                     "dispatches to the direct recipe ") +
                         recipe_name(dispatch.recipe));
    return run_two_stage(metric, phi, S, classification, dispatch.gamma, options);
}

ManufacturedSolve solve_manufactured(const ChartGrid& grid, double amplitude,
                                     const SolverOptions& options) {
    ManufacturedSolve out;
    out.mms = manufactured_solution_case(grid, amplitude);
    const ConformalMetric metric = ConformalMetric::flat(grid);

    SubSuperPair pair;
    pair.lower = ScalarField(grid, out.mms.rangeMin);
    pair.upper = ScalarField(grid, out.mms.rangeMax);
    pair.target = TargetCurvature::prescribed(out.mms.source);
    pair.boundary = out.mms.boundary;

    out.settings = make_iteration_settings(metric, pair, options.relResidual, options.maxSteps);
    out.settings.enforceMonotone = false;
    out.iteration = iterate_fixed_point(metric, pair, out.mms.exact, out.settings);

    double sup = 0.0;
    double wsum = 0.0;
    double dsum = 0.0;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        if (grid.isBoundaryNode(i)) continue;
        const double d = std::abs(out.iteration.solution[i] - out.mms.exact[i]);
        sup = std::max(sup, d);
        const double w = metric.volumeWeight()[static_cast<std::size_t>(i)];
        wsum += w;
        dsum += w * d * d;
    }
    out.errorSup = sup;
    out.errorL2 = wsum > 0.0 ? std::sqrt(dsum / wsum) : 0.0;

    const ResidualReport truncation =
        equation_residual(metric, out.mms.exact, pair.target, pair.boundary);
    out.truncationSup = truncation.interiorSup;
    out.truncationL2 = truncation.interiorL2;

    out.curvature = check_or_fail(metric, out.iteration.solution, pair.target, pair.boundary,
                                  out.settings.tolResidual);
    return out;
}

}  // namespace conflab
