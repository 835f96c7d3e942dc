#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Deterministic data-parallel reductions.
//
// Every reduction here is computed from fixed-size blocks: threads fill a
// partial-result array indexed by block, then the partials are combined
// serially in block order.  The result is bitwise identical for any thread
// count, including 1, so tests can pin down floating-point output exactly.
// Plain serial counterparts live in conflab::serial for cross-checking.

namespace conflab {

inline constexpr std::size_t kReductionBlock = 2048;

/// Dot product with fixed-block accumulation (thread-count independent).
inline double det_dot(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
    if (nblocks == 0) return 0.0;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
    for (long long bi = 0; bi < static_cast<long long>(nblocks); ++bi) {
        const std::size_t lo = static_cast<std::size_t>(bi) * kReductionBlock;
        const std::size_t hi = lo + kReductionBlock < n ? lo + kReductionBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
        partial[static_cast<std::size_t>(bi)] = s;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < nblocks; ++i) total += partial[i];
    return total;
}

/// Weighted dot a'*diag(w)*b, same blocking contract as det_dot.
inline double det_dot_weighted(const std::vector<double>& a,
                               const std::vector<double>& w,
                               const std::vector<double>& b) {
    const std::size_t n = a.size();
    const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
    if (nblocks == 0) return 0.0;
    std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
    for (long long bi = 0; bi < static_cast<long long>(nblocks); ++bi) {
        const std::size_t lo = static_cast<std::size_t>(bi) * kReductionBlock;
        const std::size_t hi = lo + kReductionBlock < n ? lo + kReductionBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i] * w[i] * b[i];
        partial[static_cast<std::size_t>(bi)] = s;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < nblocks; ++i) total += partial[i];
    return total;
}

inline double det_nrm2(const std::vector<double>& a) {
    return std::sqrt(det_dot(a, a));
}

/// Max of |a[i]|.  Order-insensitive, safe as a plain reduction.
inline double sup_abs(const std::vector<double>& a) {
    double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
    for (long long i = 0; i < static_cast<long long>(a.size()); ++i) {
        const double v = std::fabs(a[static_cast<std::size_t>(i)]);
        if (v > m) m = v;
    }
    return m;
}

inline double min_value(const std::vector<double>& a) {
    double m = a.empty() ? 0.0 : a[0];
#pragma omp parallel for reduction(min : m) schedule(static)
    for (long long i = 0; i < static_cast<long long>(a.size()); ++i) {
        const double v = a[static_cast<std::size_t>(i)];
        if (v < m) m = v;
    }
    return m;
}

inline double max_value(const std::vector<double>& a) {
    double m = a.empty() ? 0.0 : a[0];
#pragma omp parallel for reduction(max : m) schedule(static)
    for (long long i = 0; i < static_cast<long long>(a.size()); ++i) {
        const double v = a[static_cast<std::size_t>(i)];
        if (v > m) m = v;
    }
    return m;
}

namespace serial {

/// Left-to-right sum, the reference the blocked reductions are checked against.
inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double min_value(const std::vector<double>& a) {
    double m = a.empty() ? 0.0 : a[0];
    for (double v : a)
        if (v < m) m = v;
    return m;
}

inline double max_value(const std::vector<double>& a) {
    double m = a.empty() ? 0.0 : a[0];
    for (double v : a)
        if (v > m) m = v;
    return m;
}

inline double sup_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) {
        const double av = std::fabs(v);
        if (av > m) m = av;
    }
    return m;
}

}  // namespace serial
}  // namespace conflab
