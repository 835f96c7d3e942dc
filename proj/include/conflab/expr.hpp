#pragma once

#include <array>
#include <memory>
#include <string>

#include "conflab/field.hpp"
#include "conflab/grid.hpp"

namespace conflab {

/// Closed-form scalar expression in the chart coordinates, for scenario
/// configs: numbers, pi, coordinates x1..x5 (aliases x, y, z, w), + - * /,
/// unary minus, sin, cos, exp, and ^ with a constant exponent.  Parsed once,
/// evaluated pointwise; evaluation is a pure function of the position.
class Expression {
public:
    /// Parse or fail (Config) with the offending position quoted.
    static Expression parse(const std::string& text);

    double eval(const std::array<double, kMaxDim>& x) const;
    const std::string& text() const { return text_; }
    /// Highest coordinate index used, 1-based; 0 for a constant expression.
    int maxCoordinate() const { return maxCoord_; }

    struct Node;  ///< opaque parse tree, defined with the parser

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    int maxCoord_ = 0;
};

/// Evaluate at every node / boundary node.  Rejects coordinates beyond the
/// grid dimension and non-finite values (Config).
ScalarField sample_expression(const ChartGrid& grid, const Expression& e);
BoundaryField sample_boundary_expression(const ChartGrid& grid, const Expression& e);

}  // namespace conflab
