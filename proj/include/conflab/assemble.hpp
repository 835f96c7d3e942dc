#pragma once

#include <vector>

#include "conflab/field.hpp"
#include "conflab/metric.hpp"
#include "conflab/sparse.hpp"

namespace conflab {

/// Which boundary closure the assembled quadratic form carries.
enum class Closure {
    Robin,     ///< all nodes kept; surface term (2/(p-2)) h_g on the faces
    Dirichlet  ///< boundary nodes eliminated; coupling kept for lifting
};

/// Symmetric form of the conformal Laplacian on the active node set.
///
///   A     = stiffness (+ S_g mass term) (+ Robin surface term)
///   mass  = volume weights of active nodes, the generalized mass diagonal
///
/// Dirichlet closure renumbers interior nodes; `couple` holds the stiffness
/// columns against boundary nodes (indexed by boundary index), so a solve with
/// boundary data phi uses rhs b - couple * phi.  The operator is an M-matrix in
/// its off-diagonal sign pattern by construction (conductivities are positive),
/// which is asserted after assembly; that is what makes the comparison
/// arguments behind the monotone iteration hold discretely.
struct AssembledOperator {
    SparseOperator A;
    std::vector<double> mass;
    std::vector<std::int64_t> activeToGrid;
    std::vector<std::int64_t> gridToActive;  // -1 when eliminated
    SparseOperator couple;                   // active x boundaryNodeCount, Dirichlet only
    double opScale = 0.0;                    // inf-norm scale of mass^-1 A

    std::int64_t size() const { return A.rows; }

    std::vector<double> gather(const ScalarField& u) const;
    void scatter(const std::vector<double>& active, ScalarField& u) const;
};

AssembledOperator assemble_operator(const ConformalMetric& metric, Closure closure,
                                    bool includeScalarTerm = true);

/// Row scale of the full Robin-closure operator; the reference magnitude used
/// for sign bands and residual tolerances.
double operator_scale(const ConformalMetric& metric);

}  // namespace conflab
