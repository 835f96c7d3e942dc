#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conflab/cg.hpp"
#include "conflab/dense_eig.hpp"
#include "conflab/errors.hpp"
#include "conflab/sparse.hpp"

#include <cmath>
#include <random>

using namespace conflab;

namespace {

// Random SPD matrix B'B + n*I as CSR, dense entries kept for cross-checks.
struct SpdFixture {
    SparseOperator A;
    std::vector<double> dense;
    std::int64_t n = 0;
};

SpdFixture random_spd(std::int64_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> B(static_cast<std::size_t>(n * n));
    for (auto& v : B) v = dist(rng);
    SpdFixture fx;
    fx.n = n;
    fx.dense.assign(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) {
            double s = i == j ? static_cast<double>(n) : 0.0;
            for (std::int64_t k = 0; k < n; ++k)
                s += B[static_cast<std::size_t>(k * n + i)] * B[static_cast<std::size_t>(k * n + j)];
            fx.dense[static_cast<std::size_t>(i * n + j)] = s;
        }
    SparseBuilder builder(n, n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            builder.add(i, j, fx.dense[static_cast<std::size_t>(i * n + j)]);
    fx.A = builder.build();
    return fx;
}

}  // namespace

TEST_CASE("builder merges duplicates and sorts columns") {
    SparseBuilder b(3, 3);
    b.add(0, 2, 1.0);
    b.add(0, 0, 2.0);
    b.add(0, 2, 0.5);
    b.add(1, 1, 3.0);
    b.add(2, 0, -1.0);
    b.add(2, 2, 4.0);
    const auto A = b.build();
    CHECK(A.rows == 3);
    CHECK(A.nnz() == 5);
    CHECK(A.indices[0] == 0);
    CHECK(A.indices[1] == 2);
    CHECK(A.data[1] == doctest::Approx(1.5));
    CHECK(A.diagonal(0) == doctest::Approx(2.0));
    CHECK(A.diagonal(1) == doctest::Approx(3.0));
    CHECK(A.offDiagonalAbsSum(2) == doctest::Approx(1.0));
    CHECK(A.maxOffDiagonal() == doctest::Approx(1.5));

    const auto d = A.dense();
    CHECK(d[2] == doctest::Approx(1.5));
    CHECK(d[4] == doctest::Approx(3.0));
    CHECK(d[6] == doctest::Approx(-1.0));
}

TEST_CASE("matvec matches dense arithmetic") {
    const auto fx = random_spd(17, 101);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(fx.n));
    for (auto& v : x) v = dist(rng);

    std::vector<double> y, yRef(static_cast<std::size_t>(fx.n), 0.0);
    fx.A.apply(x, y);
    for (std::int64_t i = 0; i < fx.n; ++i) {
        double s = 0.0;
        for (std::int64_t j = 0; j < fx.n; ++j)
            s += fx.dense[static_cast<std::size_t>(i * fx.n + j)] * x[static_cast<std::size_t>(j)];
        yRef[static_cast<std::size_t>(i)] = s;
    }
    for (std::int64_t i = 0; i < fx.n; ++i)
        CHECK(y[static_cast<std::size_t>(i)] ==
              doctest::Approx(yRef[static_cast<std::size_t>(i)]).epsilon(1e-12));

    // Shifted apply: A x + shift * diag(d) x.
    std::vector<double> d(static_cast<std::size_t>(fx.n));
    for (auto& v : d) v = 1.0 + std::abs(dist(rng));
    std::vector<double> ys;
    fx.A.applyShifted(x, d, 0.75, ys);
    for (std::int64_t i = 0; i < fx.n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        CHECK(ys[iu] == doctest::Approx(y[iu] + 0.75 * d[iu] * x[iu]).epsilon(1e-12));
    }
}

TEST_CASE("cg solves a random SPD system") {
    const auto fx = random_spd(40, 7);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> xTrue(static_cast<std::size_t>(fx.n));
    for (auto& v : xTrue) v = dist(rng);
    std::vector<double> b;
    fx.A.apply(xTrue, b);

    std::vector<double> x(static_cast<std::size_t>(fx.n), 0.0);
    const auto res = cg_solve(fx.A, b, x);
    CHECK(res.converged);
    CHECK(res.relResidual <= 1e-12);
    for (std::int64_t i = 0; i < fx.n; ++i)
        CHECK(x[static_cast<std::size_t>(i)] ==
              doctest::Approx(xTrue[static_cast<std::size_t>(i)]).epsilon(1e-8));
}

TEST_CASE("shifted cg matches solving the shifted matrix directly") {
    const auto fx = random_spd(25, 9);
    std::vector<double> d(25, 0.0);
    std::mt19937 rng(10);
    std::uniform_real_distribution<double> dist(0.5, 2.0);
    for (auto& v : d) v = dist(rng);
    std::vector<double> b(25, 1.0);

    std::vector<double> x1(25, 0.0);
    const auto r1 = cg_solve_shifted(fx.A, d, 3.0, b, x1);
    CHECK(r1.converged);

    SparseBuilder builder(25, 25);
    for (std::int64_t i = 0; i < 25; ++i)
        for (std::int64_t j = 0; j < 25; ++j)
            builder.add(i, j, fx.dense[static_cast<std::size_t>(i * 25 + j)] +
                                  (i == j ? 3.0 * d[static_cast<std::size_t>(i)] : 0.0));
    std::vector<double> x2(25, 0.0);
    const auto r2 = cg_solve(builder.build(), b, x2);
    CHECK(r2.converged);
    for (std::size_t i = 0; i < 25; ++i)
        CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-9));
}

TEST_CASE("cg rejects an indefinite operator") {
    SparseBuilder b(2, 2);
    b.add(0, 0, 1.0);
    b.add(1, 1, -1.0);
    const auto A = b.build();
    std::vector<double> rhs = {1.0, 1.0};
    std::vector<double> x = {0.0, 0.0};
    CHECK_THROWS_AS(cg_solve(A, rhs, x), Error);
}

TEST_CASE("jacobi eigensolver on a known matrix") {
    // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
    const auto r = dense_jacobi_eigensolver({2.0, 1.0, 1.0, 2.0}, 2);
    REQUIRE(r.values.size() == 2);
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.values[1] == doctest::Approx(3.0).epsilon(1e-12));
    // Eigenvector of the smallest eigenvalue is (1,-1)/sqrt(2) up to sign.
    CHECK(std::abs(r.vectors[0]) == doctest::Approx(std::abs(r.vectors[1])).epsilon(1e-10));
    CHECK(r.vectors[0] * r.vectors[1] < 0.0);
}

TEST_CASE("jacobi eigensolver reproduces the 1D Dirichlet spectrum") {
    // Tridiagonal (-1, 2, -1) of size m has eigenvalues 2 - 2 cos(k pi/(m+1)).
    const std::int64_t m = 12;
    std::vector<double> A(static_cast<std::size_t>(m * m), 0.0);
    for (std::int64_t i = 0; i < m; ++i) {
        A[static_cast<std::size_t>(i * m + i)] = 2.0;
        if (i > 0) A[static_cast<std::size_t>(i * m + i - 1)] = -1.0;
        if (i + 1 < m) A[static_cast<std::size_t>(i * m + i + 1)] = -1.0;
    }
    const auto r = dense_jacobi_eigensolver(A, m);
    for (std::int64_t k = 1; k <= m; ++k) {
        const double expected =
            2.0 - 2.0 * std::cos(static_cast<double>(k) * 3.14159265358979323846 / (m + 1));
        CHECK(r.values[static_cast<std::size_t>(k - 1)] ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("generalized smallest eigenvalue agrees with explicit scaling") {
    const auto fx = random_spd(15, 33);
    std::vector<double> m(15);
    std::mt19937 rng(34);
    std::uniform_real_distribution<double> dist(0.5, 2.0);
    for (auto& v : m) v = dist(rng);

    const double lam = dense_smallest_generalized_eigenvalue(fx.A, m);

    // Same pencil scaled by hand.
    std::vector<double> scaled(fx.dense);
    for (std::int64_t i = 0; i < 15; ++i)
        for (std::int64_t j = 0; j < 15; ++j)
            scaled[static_cast<std::size_t>(i * 15 + j)] /=
                std::sqrt(m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)]);
    const auto r = dense_jacobi_eigensolver(scaled, 15);
    CHECK(lam == doctest::Approx(r.values[0]).epsilon(1e-10));
}
