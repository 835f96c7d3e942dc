#include "conflab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "conflab/assemble.hpp"
#include "conflab/errors.hpp"

namespace conflab {

namespace {

void require_positive_factor(const ScalarField& u, const char* what) {
    if (u.min() > 0.0) return;
    std::ostringstream msg;
    msg << what << " must be strictly positive (min " << u.min() << ")";
    fail_config(msg.str());
}

}  // namespace

ScalarField scalar_curvature_of_solution(const ConformalMetric& metric, const ScalarField& u) {
    require_positive_factor(u, "conformal factor");
    return metric.rescaled(u).scalarCurvature();
}

CurvatureCheck check_curvature(const ConformalMetric& metric, const ScalarField& u,
                               const TargetCurvature& target, const BoundaryField& data,
                               double tolResidual) {
    require_positive_factor(u, "solution");
    const ChartGrid& grid = metric.grid();
    const DimensionConstants& dc = grid.constants();

    const ConformalMetric solved = metric.rescaled(u);

    CurvatureCheck out;
    out.recomputed = solved.scalarCurvature();

    double sup = 0.0;
    double wsum = 0.0;
    double dsum = 0.0;
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        if (grid.isBoundaryNode(i)) continue;
        const double d = std::abs(out.recomputed[i] - target.at(i));
        if (d > sup) sup = d;
        const double w = solved.volumeWeight()[static_cast<std::size_t>(i)];
        wsum += w;
        dsum += w * d * d;
    }
    out.deviationSup = sup;
    out.deviationL2 = wsum > 0.0 ? std::sqrt(dsum / wsum) : 0.0;

    double bsup = 0.0;
    double dataAbs = 0.0;
    for (std::int64_t b = 0; b < grid.boundaryNodeCount(); ++b) {
        const double d = std::abs(u[grid.boundaryToGrid(b)] - data[b]);
        if (d > bsup) bsup = d;
        dataAbs = std::max(dataAbs, std::abs(data[b]));
    }
    out.boundarySup = bsup;

    // The recomputed curvature is residual * u^(1-p) off the target node by
    // node; the factor 10 covers the different summation orders of the two
    // evaluation routes.
    out.tolSup = 10.0 * tolResidual / std::pow(u.min(), dc.p - 1.0);
    out.tolBoundary = 1e-13 * (1.0 + dataAbs);
    out.pass = out.deviationSup <= out.tolSup && out.boundarySup <= out.tolBoundary;
    return out;
}

BoundaryField boundary_data_from_factor(const ChartGrid& grid, BoundaryMapKind kind,
                                        const BoundaryField& data) {
    const DimensionConstants& dc = grid.constants();
    BoundaryField out(grid);
    if (kind == BoundaryMapKind::PowerFactor) {
        if (!dc.hasBoundaryExponent)
            fail_unsupported(
                "the power-law boundary map needs n >= 4 (its exponent has n - 3 in the "
                "denominator); for n = 3 use the exponential map");
        if (data.min() <= 0.0) fail_config("boundary factor must be strictly positive");
        const double exponent = dc.pBoundary / (dc.p - 2.0);
        for (std::int64_t b = 0; b < out.size(); ++b) out[b] = std::pow(data[b], exponent);
        return out;
    }
    // exp(2 f / (p - 2)) = exp(robinCoeff * f); defined in every dimension.
    for (std::int64_t b = 0; b < out.size(); ++b) out[b] = std::exp(dc.robinCoeff * data[b]);
    return out;
}

ManufacturedCase manufactured_solution_case(const ChartGrid& grid, double amplitude) {
    const DimensionConstants& dc = grid.constants();
    if (dc.n != 3) fail_config("the manufactured case is defined on n = 3 slabs only");
    if (!grid.hasBoundary()) fail_config("the manufactured case needs a slab grid");
    if (!(amplitude > 0.0 && amplitude <= 0.05))
        fail_config("manufactured amplitude must lie in (0, 0.05]; larger amplitudes break "
                    "the fixed-point contraction");

    const double L1 = grid.lengths()[0];
    const double L2 = grid.lengths()[1];
    const double L = grid.lengths()[2];
    const double k1 = 2.0 * std::numbers::pi / L1;
    const double k2 = 2.0 * std::numbers::pi / L2;
    const double A = amplitude;

    ManufacturedCase out;
    out.amplitude = A;
    out.exact = sample_field(grid, [&](const std::array<double, kMaxDim>& x) {
        const double q = 4.0 * x[2] * (L - x[2]) / (L * L);
        return 1.0 + A * std::sin(k1 * x[0]) * std::sin(k2 * x[1]) * q;
    });
    // -Lap u* = A s1 s2 ((k1^2 + k2^2) q + 8 / L^2), so the source in
    // -a Lap u = S u^(p-1) is a times that over u*^(p-1).
    out.source = sample_field(grid, [&](const std::array<double, kMaxDim>& x) {
        const double s12 = std::sin(k1 * x[0]) * std::sin(k2 * x[1]);
        const double q = 4.0 * x[2] * (L - x[2]) / (L * L);
        const double u = 1.0 + A * s12 * q;
        const double negLap = A * s12 * ((k1 * k1 + k2 * k2) * q + 8.0 / (L * L));
        return dc.a * negLap / std::pow(u, dc.p - 1.0);
    });
    out.boundary = BoundaryField(grid, 1.0);
    out.rangeMin = 1.0 - 2.0 * A - 0.02;
    out.rangeMax = 1.0 + 2.0 * A + 0.02;
    return out;
}

ObstructionReport closed_torus_obstruction_check(const ChartGrid& torus, const ScalarField& u) {
    if (torus.hasBoundary())
        fail_config("the obstruction check runs on a closed torus grid (every axis periodic)");
    require_positive_factor(u, "conformal factor");
    const DimensionConstants& dc = torus.constants();

    // Unit potential: the operator is -a Lap + 1 and the base "curvature" is 1.
    const ConformalMetric metric = ConformalMetric::flatWithPotential(torus, ScalarField(torus, 1.0));

    ObstructionReport out;
    out.inducedS = metric.rescaled(u).scalarCurvature();

    const AssembledOperator op = assemble_operator(metric, Closure::Robin, true);
    const std::vector<double> x = op.gather(u);
    std::vector<double> y(x.size());
    op.A.apply(x, y);

    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        lhs += x[j] * y[j];
        const std::int64_t node = op.activeToGrid[j];
        rhs += op.mass[j] * out.inducedS[node] * std::pow(u[node], dc.p);
    }
    out.lhs = lhs;
    out.rhs = rhs;
    out.relGap = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    out.maxS = out.inducedS.max();
    out.identityHolds = out.relGap <= 1e-10;
    out.obstructed = out.maxS > 0.0;
    return out;
}

}  // namespace conflab
