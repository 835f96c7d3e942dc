#include "conflab/metric.hpp"

#include <cmath>

#include "conflab/errors.hpp"

namespace conflab {

namespace {

void require_positive_factor(const ScalarField& psi, const char* what) {
    if (psi.min() <= 0.0)
        fail_config(std::string(what) + " must be strictly positive everywhere (min = " +
                    std::to_string(psi.min()) + ")");
}

}  // namespace

ScalarField flat_laplacian_with_onesided_boundary(const ChartGrid& grid, const ScalarField& u) {
    ScalarField out(grid);
    const int dim = grid.dim();
    const auto& h = grid.spacing();
    const int zAxis = dim - 1;
    const int zLast = grid.shape().back() - 1;
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < static_cast<long long>(grid.nodeCount()); ++node) {
        double acc = 0.0;
        const auto c = grid.coord(node);
        for (int ax = 0; ax < dim; ++ax) {
            const double inv_h2 = 1.0 / (h[static_cast<std::size_t>(ax)] * h[static_cast<std::size_t>(ax)]);
            const int ci = c[static_cast<std::size_t>(ax)];
            if (ax == zAxis && !grid.periodic(ax) && (ci == 0 || ci == zLast)) {
                // one-sided second derivative, O(h^2): (2,-5,4,-1)/h^2
                const int dir = ci == 0 ? 1 : -1;
                const std::int64_t n1 = grid.neighbor(node, ax, dir);
                const std::int64_t n2 = grid.neighbor(node, ax, 2 * dir);
                const std::int64_t n3 = grid.neighbor(node, ax, 3 * dir);
                acc += (2.0 * u[node] - 5.0 * u[n1] + 4.0 * u[n2] - u[n3]) * inv_h2;
            } else {
                const std::int64_t nm = grid.neighbor(node, ax, -1);
                const std::int64_t np = grid.neighbor(node, ax, +1);
                acc += (u[np] - 2.0 * u[node] + u[nm]) * inv_h2;
            }
        }
        out[node] = acc;
    }
    return out;
}

ConformalMetric::ConformalMetric(const ChartGrid& grid, ScalarField psi, ScalarField potential,
                                 bool flatFactor, bool hasPotential)
    : grid_(&grid), psi_(std::move(psi)), potential_(std::move(potential)),
      flatFactor_(flatFactor), hasPotential_(hasPotential) {
    const DimensionConstants& dc = grid.constants();

    volumeWeight_.resize(static_cast<std::size_t>(grid.nodeCount()));
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(grid.nodeCount()); ++i)
        volumeWeight_[static_cast<std::size_t>(i)] =
            std::pow(psi_[i], dc.p) * grid.cellVolume(i);

    areaWeight_.resize(static_cast<std::size_t>(grid.boundaryNodeCount()));
    const double latArea = grid.hasBoundary() ? grid.lateralArea() : 0.0;
    for (std::int64_t b = 0; b < grid.boundaryNodeCount(); ++b)
        areaWeight_[static_cast<std::size_t>(b)] =
            std::pow(psi_[grid.boundaryToGrid(b)], 0.5 * dc.a) * latArea;

    // S_g = psi^(1-p) (-a Lap_delta psi + V psi); the same flat stencil the
    // covariance identity is anchored to.  Boundary entries of Lap psi come
    // from the one-sided normal second difference.
    if (flatFactor_) {
        scalarCurvature_ = hasPotential_ ? potential_ : ScalarField(grid, 0.0);
    } else {
        ScalarField lapPsi = flat_laplacian_with_onesided_boundary(grid, psi_);
        scalarCurvature_ = ScalarField(grid);
        scalarCurvature_.boundaryExtrapolated = grid.hasBoundary();
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(grid.nodeCount()); ++i)
            scalarCurvature_[i] = std::pow(psi_[i], 1.0 - dc.p) *
                                  (-dc.a * lapPsi[i] + potential_[i] * psi_[i]);
    }

    // h_g = (2/(n-2)) psi^(-n/(n-2)) dpsi/dnu, one-sided O(h^2) normal slope.
    meanCurvature_ = BoundaryField(grid, 0.0);
    if (grid.hasBoundary() && !flatFactor_) {
        const int zAxis = grid.dim() - 1;
        const double hz = grid.spacing().back();
        const double coeff = 2.0 / (dc.n - 2);
        const double expo = -static_cast<double>(dc.n) / (dc.n - 2);
        for (std::int64_t b = 0; b < grid.boundaryNodeCount(); ++b) {
            const std::int64_t node = grid.boundaryToGrid(b);
            const int dir = grid.boundaryFace(node) == 0 ? 1 : -1;
            const std::int64_t n1 = grid.neighbor(node, zAxis, dir);
            const std::int64_t n2 = grid.neighbor(node, zAxis, 2 * dir);
            const double slopeInward =
                (-3.0 * psi_[node] + 4.0 * psi_[n1] - psi_[n2]) / (2.0 * hz);
            const double dnu = -slopeInward;  // outward normal
            meanCurvature_[b] = coeff * std::pow(psi_[node], expo) * dnu;
        }
    }
}

ConformalMetric ConformalMetric::flat(const ChartGrid& grid) {
    return ConformalMetric(grid, ScalarField(grid, 1.0), ScalarField(grid, 0.0), true, false);
}

ConformalMetric ConformalMetric::conformallyFlat(const ChartGrid& grid, ScalarField psi) {
    require_positive_factor(psi, "conformal factor");
    return ConformalMetric(grid, std::move(psi), ScalarField(grid, 0.0), false, false);
}

ConformalMetric ConformalMetric::flatWithPotential(const ChartGrid& grid, ScalarField V) {
    return ConformalMetric(grid, ScalarField(grid, 1.0), std::move(V), true, true);
}

ConformalMetric ConformalMetric::withPotential(const ChartGrid& grid, ScalarField psi,
                                               ScalarField V) {
    require_positive_factor(psi, "conformal factor");
    return ConformalMetric(grid, std::move(psi), std::move(V), false, true);
}

std::string ConformalMetric::kindName() const {
    if (flatFactor_) return hasPotential_ ? "potential" : "flat";
    return hasPotential_ ? "conformal-potential" : "conformal";
}

ConformalMetric ConformalMetric::rescaled(const ScalarField& u) const {
    require_positive_factor(u, "conformal rescaling factor");
    ScalarField prod(*grid_);
    for (std::int64_t i = 0; i < grid_->nodeCount(); ++i) prod[i] = psi_[i] * u[i];
    prod.boundaryExtrapolated = false;
    return ConformalMetric(*grid_, std::move(prod), potential_, false, hasPotential_);
}

ScalarField laplace_beltrami(const ConformalMetric& metric, const ScalarField& u) {
    const ChartGrid& grid = metric.grid();
    const DimensionConstants& dc = grid.constants();
    const ScalarField& psi = metric.factor();
    const auto& h = grid.spacing();
    const int dim = grid.dim();
    ScalarField out(grid);
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < static_cast<long long>(grid.nodeCount()); ++node) {
        if (grid.isBoundaryNode(node)) continue;
        double acc = 0.0;
        for (int ax = 0; ax < dim; ++ax) {
            const double inv_h2 = 1.0 / (h[static_cast<std::size_t>(ax)] * h[static_cast<std::size_t>(ax)]);
            const std::int64_t nm = grid.neighbor(node, ax, -1);
            const std::int64_t np = grid.neighbor(node, ax, +1);
            acc += (psi[node] * psi[np] * (u[np] - u[node]) +
                    psi[node] * psi[nm] * (u[nm] - u[node])) * inv_h2;
        }
        out[node] = std::pow(psi[node], -dc.p) * acc;
    }
    return out;
}

ScalarField conformal_stiffness_apply(const ConformalMetric& metric, const ScalarField& u) {
    const ChartGrid& grid = metric.grid();
    const DimensionConstants& dc = grid.constants();
    const ScalarField& psi = metric.factor();
    const auto& h = grid.spacing();
    const int dim = grid.dim();
    ScalarField out(grid);
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < static_cast<long long>(grid.nodeCount()); ++node) {
        if (grid.isBoundaryNode(node)) continue;
        double acc = 0.0;
        for (int ax = 0; ax < dim; ++ax) {
            const double inv_h2 = 1.0 / (h[static_cast<std::size_t>(ax)] * h[static_cast<std::size_t>(ax)]);
            const std::int64_t nm = grid.neighbor(node, ax, -1);
            const std::int64_t np = grid.neighbor(node, ax, +1);
            acc += (psi[node] * psi[np] * (u[np] - u[node]) +
                    psi[node] * psi[nm] * (u[nm] - u[node])) * inv_h2;
        }
        out[node] = -dc.a * std::pow(psi[node], -dc.p) * acc;
    }
    return out;
}

namespace serial {

ScalarField conformal_stiffness_apply(const ConformalMetric& metric, const ScalarField& u) {
    const ChartGrid& grid = metric.grid();
    const DimensionConstants& dc = grid.constants();
    const ScalarField& psi = metric.factor();
    const auto& h = grid.spacing();
    const int dim = grid.dim();
    ScalarField out(grid);
    for (std::int64_t node = 0; node < grid.nodeCount(); ++node) {
        if (grid.isBoundaryNode(node)) continue;
        double acc = 0.0;
        for (int ax = 0; ax < dim; ++ax) {
            const double inv_h2 = 1.0 / (h[static_cast<std::size_t>(ax)] * h[static_cast<std::size_t>(ax)]);
            const std::int64_t nm = grid.neighbor(node, ax, -1);
            const std::int64_t np = grid.neighbor(node, ax, +1);
            acc += (psi[node] * psi[np] * (u[np] - u[node]) +
                    psi[node] * psi[nm] * (u[nm] - u[node])) * inv_h2;
        }
        out[node] = -dc.a * std::pow(psi[node], -dc.p) * acc;
    }
    return out;
}

}  // namespace serial
}  // namespace conflab
