#include "conflab/assemble.hpp"

#include <cmath>

#include "conflab/errors.hpp"

namespace conflab {

namespace {

/// Product of dual lengths over all axes except `axis` (shared by both edge
/// endpoints, which differ only along `axis`).
double perp_measure(const ChartGrid& grid, std::int64_t node, int axis) {
    double s = 1.0;
    for (int ax = 0; ax < grid.dim(); ++ax)
        if (ax != axis) s *= grid.dualLength(node, ax);
    return s;
}

}  // namespace

std::vector<double> AssembledOperator::gather(const ScalarField& u) const {
    std::vector<double> out(activeToGrid.size());
    for (std::size_t i = 0; i < activeToGrid.size(); ++i)
        out[i] = u[activeToGrid[i]];
    return out;
}

void AssembledOperator::scatter(const std::vector<double>& active, ScalarField& u) const {
    for (std::size_t i = 0; i < activeToGrid.size(); ++i)
        u[activeToGrid[i]] = active[i];
}

AssembledOperator assemble_operator(const ConformalMetric& metric, Closure closure,
                                    bool includeScalarTerm) {
    const ChartGrid& grid = metric.grid();
    const DimensionConstants& dc = grid.constants();
    const ScalarField& psi = metric.factor();
    const auto& h = grid.spacing();

    if (closure == Closure::Dirichlet && !grid.hasBoundary())
        fail_config("Dirichlet closure needs a slab grid with boundary faces");

    AssembledOperator op;
    op.gridToActive.assign(static_cast<std::size_t>(grid.nodeCount()), -1);
    const bool keepBoundary = closure == Closure::Robin;
    for (std::int64_t node = 0; node < grid.nodeCount(); ++node) {
        if (!keepBoundary && grid.isBoundaryNode(node)) continue;
        op.gridToActive[static_cast<std::size_t>(node)] =
            static_cast<std::int64_t>(op.activeToGrid.size());
        op.activeToGrid.push_back(node);
    }
    const std::int64_t nActive = static_cast<std::int64_t>(op.activeToGrid.size());

    op.mass.resize(static_cast<std::size_t>(nActive));
    for (std::int64_t i = 0; i < nActive; ++i)
        op.mass[static_cast<std::size_t>(i)] =
            metric.volumeWeight()[static_cast<std::size_t>(op.activeToGrid[static_cast<std::size_t>(i)])];

    SparseBuilder builder(nActive, nActive);
    SparseBuilder coupleBuilder(nActive, grid.boundaryNodeCount());

    for (std::int64_t row = 0; row < nActive; ++row) {
        const std::int64_t node = op.activeToGrid[static_cast<std::size_t>(row)];
        double diag = 0.0;
        for (int ax = 0; ax < grid.dim(); ++ax) {
            const double hax = h[static_cast<std::size_t>(ax)];
            const double perp = perp_measure(grid, node, ax);
            for (int step : {-1, +1}) {
                const std::int64_t nb = grid.neighbor(node, ax, step);
                if (nb < 0) continue;  // past a slab face
                const double w = dc.a * psi[node] * psi[nb] * perp / hax;
                diag += w;
                const std::int64_t nbActive = op.gridToActive[static_cast<std::size_t>(nb)];
                if (nbActive >= 0) {
                    builder.add(row, nbActive, -w);
                } else {
                    coupleBuilder.add(row, grid.boundaryIndex(nb), -w);
                }
            }
        }
        if (includeScalarTerm)
            diag += metric.scalarCurvature()[node] * op.mass[static_cast<std::size_t>(row)];
        if (keepBoundary && grid.isBoundaryNode(node)) {
            // Weak form of the natural condition d_nu phi = -robinCoeff h_g phi
            // for -a Lap: the flux term enters the form as a * robinCoeff * h_g.
            const std::int64_t b = grid.boundaryIndex(node);
            diag += dc.a * dc.robinCoeff * metric.meanCurvature()[b] *
                    metric.boundaryAreaWeight()[static_cast<std::size_t>(b)];
        }
        builder.add(row, row, diag);
    }

    op.A = builder.build();
    if (closure == Closure::Dirichlet) op.couple = coupleBuilder.build();

    // M-matrix sign pattern: every off-diagonal must be nonpositive.
    if (op.A.maxOffDiagonal() > 0.0)
        fail_numerical("assembled operator has a positive off-diagonal entry");

    double scale = 0.0;
    for (std::int64_t r = 0; r < nActive; ++r) {
        const double rowSum =
            std::abs(op.A.diagonal(r)) + op.A.offDiagonalAbsSum(r);
        const double s = rowSum / op.mass[static_cast<std::size_t>(r)];
        if (s > scale) scale = s;
    }
    op.opScale = scale;
    return op;
}

double operator_scale(const ConformalMetric& metric) {
    return assemble_operator(metric, Closure::Robin, true).opScale;
}

}  // namespace conflab
