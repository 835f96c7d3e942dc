#pragma once

#include <vector>

#include "conflab/sparse.hpp"

namespace conflab {

struct DenseEigenResult {
    std::vector<double> values;   ///< ascending
    std::vector<double> vectors;  ///< row-major: vectors[k*n + i] = component i of eigenvector k
};

/// Cyclic Jacobi eigensolver for a dense symmetric matrix (row-major n*n).
/// Sweeps until the off-diagonal Frobenius norm drops below
/// 1e-12 * ||A||_F.  Intended as the small-problem oracle (n <= 4096);
/// rejects larger inputs.
DenseEigenResult dense_jacobi_eigensolver(std::vector<double> A, std::int64_t n);

/// Smallest eigenvalue of the pencil A v = lambda diag(m) v via the dense
/// Jacobi solver on diag(m)^(-1/2) A diag(m)^(-1/2).  Oracle use only.
double dense_smallest_generalized_eigenvalue(const SparseOperator& A,
                                             const std::vector<double>& m);

}  // namespace conflab
