#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace conflab {

inline constexpr int kMaxDim = 5;

/// Constants tied to the spatial dimension n >= 3.
///
///   a            = 4(n-1)/(n-2), the conformal Laplacian gradient factor
///   p            = 2n/(n-2), the critical Sobolev exponent
///   robinCoeff   = 2/(p-2) = (n-2)/2, the boundary-term coefficient
///   pBoundary    = (n+1)/(n-3), the boundary trace exponent, n >= 4 only
struct DimensionConstants {
    int n = 0;
    double a = 0.0;
    double p = 0.0;
    double robinCoeff = 0.0;
    bool hasBoundaryExponent = false;
    double pBoundary = 0.0;

    static DimensionConstants make(int n);
};

/// Uniform tensor grid on a product of circles and (optionally) one interval.
///
/// Axes 0..n-2 are periodic; the last axis is either an interval with two
/// boundary faces (slab chart) or periodic as well (closed torus, used by the
/// obstruction check only).  Node storage is row-major with the last axis
/// fastest.  Spacing is length/shape on periodic axes and length/(shape-1)
/// on the interval.
class ChartGrid {
public:
    /// Slab chart: last axis non-periodic, all others periodic.
    static ChartGrid slab(int n, const std::vector<int>& shape,
                          const std::vector<double>& lengths);

    /// Closed torus: every axis periodic, no boundary.
    static ChartGrid torus(int n, const std::vector<int>& shape,
                           const std::vector<double>& lengths);

    int dim() const { return dim_; }
    const DimensionConstants& constants() const { return dc_; }
    const std::vector<int>& shape() const { return shape_; }
    const std::vector<double>& lengths() const { return lengths_; }
    const std::vector<double>& spacing() const { return spacing_; }
    bool periodic(int axis) const { return periodic_[static_cast<std::size_t>(axis)]; }
    bool hasBoundary() const { return !periodic_.back(); }

    std::int64_t nodeCount() const { return nodeCount_; }
    /// Nodes on one boundary face (0 for a torus grid).
    std::int64_t faceNodeCount() const { return hasBoundary() ? lateralCount_ : 0; }
    std::int64_t boundaryNodeCount() const { return 2 * faceNodeCount(); }
    std::int64_t interiorNodeCount() const { return nodeCount_ - boundaryNodeCount(); }

    std::int64_t index(const std::array<int, kMaxDim>& coord) const {
        std::int64_t idx = 0;
        for (int ax = 0; ax < dim_; ++ax) idx += stride_[static_cast<std::size_t>(ax)] * coord[static_cast<std::size_t>(ax)];
        return idx;
    }

    std::array<int, kMaxDim> coord(std::int64_t node) const {
        std::array<int, kMaxDim> c{};
        for (int ax = 0; ax < dim_; ++ax) {
            c[static_cast<std::size_t>(ax)] = static_cast<int>(node / stride_[static_cast<std::size_t>(ax)]);
            node %= stride_[static_cast<std::size_t>(ax)];
        }
        return c;
    }

    /// Physical position of a node (x_k = i_k * h_k).
    std::array<double, kMaxDim> position(std::int64_t node) const {
        const auto c = coord(node);
        std::array<double, kMaxDim> x{};
        for (int ax = 0; ax < dim_; ++ax)
            x[static_cast<std::size_t>(ax)] = c[static_cast<std::size_t>(ax)] * spacing_[static_cast<std::size_t>(ax)];
        return x;
    }

    /// Neighbor along an axis, wrapping on periodic axes; -1 past a face.
    std::int64_t neighbor(std::int64_t node, int axis, int step) const {
        const auto c = coord(node);
        int ci = c[static_cast<std::size_t>(axis)] + step;
        const int s = shape_[static_cast<std::size_t>(axis)];
        if (periodic_[static_cast<std::size_t>(axis)]) {
            ci = (ci % s + s) % s;
        } else if (ci < 0 || ci >= s) {
            return -1;
        }
        return node + stride_[static_cast<std::size_t>(axis)] * (ci - c[static_cast<std::size_t>(axis)]);
    }

    bool isBoundaryNode(std::int64_t node) const {
        if (!hasBoundary()) return false;
        const int zi = static_cast<int>(node % shape_.back());
        return zi == 0 || zi == shape_.back() - 1;
    }

    /// Boundary enumeration: face 0 (z = 0) first, then face 1 (z = L),
    /// lateral nodes in row-major order within each face.
    std::int64_t boundaryIndex(std::int64_t node) const;
    std::int64_t boundaryToGrid(std::int64_t bIndex) const;
    /// 0 or 1; only valid for boundary nodes.
    int boundaryFace(std::int64_t node) const {
        const int zi = static_cast<int>(node % shape_.back());
        return zi == 0 ? 0 : 1;
    }

    /// Dual cell length along an axis: spacing, halved at interval endpoints.
    double dualLength(std::int64_t node, int axis) const {
        const double h = spacing_[static_cast<std::size_t>(axis)];
        if (periodic_[static_cast<std::size_t>(axis)]) return h;
        const int ci = coord(node)[static_cast<std::size_t>(axis)];
        return (ci == 0 || ci == shape_[static_cast<std::size_t>(axis)] - 1) ? 0.5 * h : h;
    }

    /// Flat dual-cell volume (product of dual lengths); sums to the domain
    /// volume exactly on both slab and torus grids.
    double cellVolume(std::int64_t node) const {
        double v = 1.0;
        for (int ax = 0; ax < dim_; ++ax) v *= dualLength(node, ax);
        return v;
    }

    /// Flat area of one lateral cell on a boundary face.
    double lateralArea() const {
        double s = 1.0;
        for (int ax = 0; ax + 1 < dim_; ++ax) s *= spacing_[static_cast<std::size_t>(ax)];
        return s;
    }

    /// Distance to the boundary, min(z, L - z); requires a slab grid.
    double boundaryDistance(std::int64_t node) const;

    bool sameLayout(const ChartGrid& other) const {
        return dim_ == other.dim_ && shape_ == other.shape_ &&
               lengths_ == other.lengths_ && periodic_ == other.periodic_;
    }

private:
    ChartGrid(int n, std::vector<int> shape, std::vector<double> lengths,
              std::vector<bool> periodic);

    int dim_ = 0;
    DimensionConstants dc_;
    std::vector<int> shape_;
    std::vector<double> lengths_;
    std::vector<bool> periodic_;
    std::vector<double> spacing_;
    std::vector<std::int64_t> stride_;
    std::int64_t nodeCount_ = 0;
    std::int64_t lateralCount_ = 0;
};

}  // namespace conflab
