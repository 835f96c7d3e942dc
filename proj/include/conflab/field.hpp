#pragma once

#include <functional>
#include <vector>

#include "conflab/grid.hpp"
#include "conflab/parallel.hpp"

namespace conflab {

/// One real value per grid node.  Carries a non-owning pointer to the grid the
/// values live on; the grid must outlive the field.
struct ScalarField {
    const ChartGrid* grid = nullptr;
    std::vector<double> values;
    /// True when boundary entries were filled by one-sided extrapolation
    /// rather than the defining formula (curvature fields only).
    bool boundaryExtrapolated = false;

    ScalarField() = default;
    ScalarField(const ChartGrid& g, double fill = 0.0)
        : grid(&g), values(static_cast<std::size_t>(g.nodeCount()), fill) {}

    double& operator[](std::int64_t i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return values[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }

    double min() const { return min_value(values); }
    double max() const { return max_value(values); }
    double supAbs() const { return sup_abs(values); }

    double minInterior() const;
    double maxInterior() const;
    double minBoundary() const;
    double maxBoundary() const;
};

/// One real value per boundary node, both faces, face 0 (z = 0) first.
struct BoundaryField {
    const ChartGrid* grid = nullptr;
    std::vector<double> values;

    BoundaryField() = default;
    BoundaryField(const ChartGrid& g, double fill = 0.0)
        : grid(&g), values(static_cast<std::size_t>(g.boundaryNodeCount()), fill) {}

    double& operator[](std::int64_t i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return values[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }

    double min() const { return min_value(values); }
    double max() const { return max_value(values); }
};

/// Evaluate f(position) at every node.
ScalarField sample_field(const ChartGrid& grid,
                         const std::function<double(const std::array<double, kMaxDim>&)>& f);

/// Evaluate f(position) at every boundary node.
BoundaryField sample_boundary(const ChartGrid& grid,
                              const std::function<double(const std::array<double, kMaxDim>&)>& f);

/// Restrict a ScalarField to the boundary nodes.
BoundaryField restrict_to_boundary(const ScalarField& u);

}  // namespace conflab
