#include "conflab/field.hpp"

#include <limits>

namespace conflab {

namespace {

template <class Pred>
double reduce_where(const ScalarField& f, bool wantMin, Pred keep) {
    const ChartGrid& g = *f.grid;
    double m = wantMin ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < g.nodeCount(); ++i) {
        if (!keep(i)) continue;
        const double v = f[i];
        if (wantMin ? v < m : v > m) m = v;
    }
    return m;
}

}  // namespace

double ScalarField::minInterior() const {
    return reduce_where(*this, true, [&](std::int64_t i) { return !grid->isBoundaryNode(i); });
}

double ScalarField::maxInterior() const {
    return reduce_where(*this, false, [&](std::int64_t i) { return !grid->isBoundaryNode(i); });
}

double ScalarField::minBoundary() const {
    return reduce_where(*this, true, [&](std::int64_t i) { return grid->isBoundaryNode(i); });
}

double ScalarField::maxBoundary() const {
    return reduce_where(*this, false, [&](std::int64_t i) { return grid->isBoundaryNode(i); });
}

ScalarField sample_field(const ChartGrid& grid,
                         const std::function<double(const std::array<double, kMaxDim>&)>& f) {
    ScalarField out(grid);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(grid.nodeCount()); ++i)
        out[i] = f(grid.position(i));
    return out;
}

BoundaryField sample_boundary(const ChartGrid& grid,
                              const std::function<double(const std::array<double, kMaxDim>&)>& f) {
    BoundaryField out(grid);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(grid.boundaryNodeCount()); ++b)
        out[b] = f(grid.position(grid.boundaryToGrid(b)));
    return out;
}

BoundaryField restrict_to_boundary(const ScalarField& u) {
    const ChartGrid& g = *u.grid;
    BoundaryField out(g);
    for (std::int64_t b = 0; b < g.boundaryNodeCount(); ++b)
        out[b] = u[g.boundaryToGrid(b)];
    return out;
}

}  // namespace conflab
