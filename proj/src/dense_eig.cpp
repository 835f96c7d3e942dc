#include "conflab/dense_eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "conflab/errors.hpp"

namespace conflab {

DenseEigenResult dense_jacobi_eigensolver(std::vector<double> A, std::int64_t n) {
    if (n > 4096) fail_config("dense eigensolver is capped at dimension 4096");
    if (static_cast<std::int64_t>(A.size()) != n * n)
        fail_config("dense eigensolver: matrix size does not match dimension");

    auto at = [&](std::int64_t i, std::int64_t j) -> double& {
        return A[static_cast<std::size_t>(i * n + j)];
    };

    std::vector<double> V(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) V[static_cast<std::size_t>(i * n + i)] = 1.0;

    double frob = 0.0;
    for (double v : A) frob += v * v;
    frob = std::sqrt(frob);
    const double stop = 1e-12 * frob;

    auto offNorm = [&]() {
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i + 1; j < n; ++j) s += at(i, j) * at(i, j);
        return std::sqrt(2.0 * s);
    };

    const int maxSweeps = 60;
    for (int sweep = 0; sweep < maxSweeps && offNorm() > stop; ++sweep) {
        for (std::int64_t p = 0; p < n - 1; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::int64_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::int64_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                for (std::int64_t k = 0; k < n; ++k) {
                    const double vkp = V[static_cast<std::size_t>(k * n + p)];
                    const double vkq = V[static_cast<std::size_t>(k * n + q)];
                    V[static_cast<std::size_t>(k * n + p)] = c * vkp - s * vkq;
                    V[static_cast<std::size_t>(k * n + q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (offNorm() > stop)
        fail_numerical("dense eigensolver failed to converge");

    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::int64_t i, std::int64_t j) { return at(i, i) < at(j, j); });

    DenseEigenResult out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n * n));
    for (std::int64_t k = 0; k < n; ++k) {
        out.values[static_cast<std::size_t>(k)] = at(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        for (std::int64_t i = 0; i < n; ++i)
            out.vectors[static_cast<std::size_t>(k * n + i)] =
                V[static_cast<std::size_t>(i * n + order[static_cast<std::size_t>(k)])];
    }
    return out;
}

double dense_smallest_generalized_eigenvalue(const SparseOperator& A,
                                             const std::vector<double>& m) {
    const std::int64_t n = A.rows;
    std::vector<double> B = A.dense();
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            B[static_cast<std::size_t>(i * n + j)] /=
                std::sqrt(m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)]);
    DenseEigenResult r = dense_jacobi_eigensolver(std::move(B), n);
    return r.values.front();
}

}  // namespace conflab
