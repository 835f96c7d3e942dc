#pragma once

#include <vector>

#include "conflab/sparse.hpp"

namespace conflab {

struct EigenSettings {
    double tolAbs = 0.0;          ///< stop at ||Av - lambda Mv||_(M^-1) <= tolAbs
    std::int64_t maxOuter = 5000;
};

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;   ///< M-normalized, M-weighted mean >= 0
    double residual = 0.0;
    std::int64_t iterations = 0;
    double shift = 0.0;           ///< the fixed inverse-iteration shift used
};

/// Smallest eigenpair of A v = lambda diag(m) v for symmetric A, via inverse
/// power iteration with a fixed shift.
///
/// The shift is the Gershgorin lower bound of diag(m)^(-1/2) A diag(m)^(-1/2)
/// minus a 10% margin (floored at 0.1% of the diagonal scale, so a bound of
/// exactly zero still yields a strictly positive-definite shifted operator).
/// Inner solves are plain CG on A - shift M, which that margin guarantees SPD.
EigenPair smallest_eigenpair(const SparseOperator& A, const std::vector<double>& m,
                             const EigenSettings& settings);

}  // namespace conflab
