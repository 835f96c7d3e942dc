#include "conflab/grid.hpp"

#include "conflab/errors.hpp"

namespace conflab {

DimensionConstants DimensionConstants::make(int n) {
    if (n < 3 || n > kMaxDim)
        fail_config("dimension must be between 3 and 5, got " + std::to_string(n));
    DimensionConstants dc;
    dc.n = n;
    dc.a = 4.0 * (n - 1) / (n - 2);
    dc.p = 2.0 * n / (n - 2);
    dc.robinCoeff = 0.5 * (n - 2);
    dc.hasBoundaryExponent = n >= 4;
    dc.pBoundary = n >= 4 ? static_cast<double>(n + 1) / (n - 3) : 0.0;
    return dc;
}

ChartGrid::ChartGrid(int n, std::vector<int> shape, std::vector<double> lengths,
                     std::vector<bool> periodic)
    : dim_(n),
      dc_(DimensionConstants::make(n)),
      shape_(std::move(shape)),
      lengths_(std::move(lengths)),
      periodic_(std::move(periodic)) {
    if (static_cast<int>(shape_.size()) != n || static_cast<int>(lengths_.size()) != n)
        fail_config("grid shape/lengths must have one entry per axis");
    for (int ax = 0; ax < n; ++ax) {
        const int s = shape_[static_cast<std::size_t>(ax)];
        const double L = lengths_[static_cast<std::size_t>(ax)];
        const int minNodes = periodic_[static_cast<std::size_t>(ax)] ? 3 : 4;
        if (s < minNodes)
            fail_config("axis " + std::to_string(ax) + " needs at least " +
                        std::to_string(minNodes) + " nodes, got " + std::to_string(s));
        if (!(L > 0.0)) fail_config("axis lengths must be positive");
        spacing_.push_back(periodic_[static_cast<std::size_t>(ax)] ? L / s : L / (s - 1));
    }
    stride_.assign(static_cast<std::size_t>(n), 1);
    for (int ax = n - 2; ax >= 0; --ax)
        stride_[static_cast<std::size_t>(ax)] =
            stride_[static_cast<std::size_t>(ax + 1)] * shape_[static_cast<std::size_t>(ax + 1)];
    nodeCount_ = stride_[0] * shape_[0];
    lateralCount_ = nodeCount_ / shape_.back();
}

ChartGrid ChartGrid::slab(int n, const std::vector<int>& shape,
                          const std::vector<double>& lengths) {
    std::vector<bool> periodic(static_cast<std::size_t>(n), true);
    if (n >= 1) periodic.back() = false;
    return ChartGrid(n, shape, lengths, periodic);
}

ChartGrid ChartGrid::torus(int n, const std::vector<int>& shape,
                           const std::vector<double>& lengths) {
    std::vector<bool> periodic(static_cast<std::size_t>(n), true);
    return ChartGrid(n, shape, lengths, periodic);
}

std::int64_t ChartGrid::boundaryIndex(std::int64_t node) const {
    const int zi = static_cast<int>(node % shape_.back());
    const std::int64_t lateral = node / shape_.back();
    if (zi == 0) return lateral;
    return lateralCount_ + lateral;
}

std::int64_t ChartGrid::boundaryToGrid(std::int64_t bIndex) const {
    const int zLast = shape_.back() - 1;
    if (bIndex < lateralCount_) return bIndex * shape_.back();
    return (bIndex - lateralCount_) * shape_.back() + zLast;
}

double ChartGrid::boundaryDistance(std::int64_t node) const {
    if (!hasBoundary())
        fail_config("boundary distance is undefined on a closed torus grid");
    const int zi = static_cast<int>(node % shape_.back());
    const double z = zi * spacing_.back();
    const double L = lengths_.back();
    return z < L - z ? z : L - z;
}

}  // namespace conflab
