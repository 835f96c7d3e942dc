#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conflab/errors.hpp"
#include "conflab/field.hpp"
#include "conflab/grid.hpp"
#include "conflab/metric.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace conflab;

namespace {

ScalarField random_positive(const ChartGrid& grid, unsigned seed, double lo = 0.5,
                            double hi = 1.5) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(grid);
    for (std::int64_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

}  // namespace

TEST_CASE("flat metric has trivial geometry") {
    const auto g = ChartGrid::slab(3, {5, 5, 7}, {1.0, 1.0, 1.0});
    const auto m = ConformalMetric::flat(g);
    CHECK(m.kindName() == "flat");
    CHECK(m.flatFactor());
    CHECK(!m.hasPotential());
    CHECK(m.scalarCurvature().supAbs() == 0.0);
    for (std::int64_t b = 0; b < g.boundaryNodeCount(); ++b)
        CHECK(m.meanCurvature()[b] == 0.0);
    for (std::int64_t i = 0; i < g.nodeCount(); ++i)
        CHECK(m.volumeWeight()[static_cast<std::size_t>(i)] ==
              doctest::Approx(g.cellVolume(i)).epsilon(1e-15));
    CHECK(m.edgeFactor(0, 1) == 1.0);
}

TEST_CASE("linear conformal factor: zero curvature, known mean curvature") {
    // psi = 1 + z is flat-harmonic, so S_g vanishes identically; the normal
    // slope is linear, which the one-sided boundary stencils reproduce
    // exactly.  For n = 3 the mean curvature is 2 psi^(-3) dpsi/dnu:
    // -2 at z = 0 (outward normal -z, psi = 1) and 2/8 at z = 1 (psi = 2).
    const auto g = ChartGrid::slab(3, {4, 4, 17}, {1.0, 1.0, 1.0});
    auto psi = sample_field(g, [](const auto& x) { return 1.0 + x[2]; });
    const auto m = ConformalMetric::conformallyFlat(g, psi);
    CHECK(m.kindName() == "conformal");
    CHECK(m.scalarCurvature().supAbs() < 1e-10);
    for (std::int64_t b = 0; b < g.boundaryNodeCount(); ++b) {
        const double expected = b < g.faceNodeCount() ? -2.0 : 0.25;
        CHECK(m.meanCurvature()[b] == doctest::Approx(expected).epsilon(1e-11));
    }
}

TEST_CASE("volume weights integrate psi^p") {
    // Integral of (1 + z)^6 over the unit slab is 127/7; the nodal quadrature
    // is second order in the slab spacing.
    const auto g = ChartGrid::slab(3, {4, 4, 65}, {1.0, 1.0, 1.0});
    auto psi = sample_field(g, [](const auto& x) { return 1.0 + x[2]; });
    const auto m = ConformalMetric::conformallyFlat(g, psi);
    double vol = 0.0;
    for (double w : m.volumeWeight()) vol += w;
    CHECK(vol == doctest::Approx(127.0 / 7.0).epsilon(2e-3));
}

TEST_CASE("periodic Laplacian reproduces the discrete symbol") {
    const auto g = ChartGrid::slab(3, {16, 4, 5}, {1.0, 1.0, 1.0});
    const auto m = ConformalMetric::flat(g);
    const double h = g.spacing()[0];
    const double sym = -(4.0 / (h * h)) *
                       std::pow(std::sin(std::numbers::pi * h), 2);
    auto u = sample_field(g, [](const auto& x) {
        return std::sin(2.0 * std::numbers::pi * x[0]);
    });
    const auto lap = laplace_beltrami(m, u);
    for (std::int64_t i = 0; i < g.nodeCount(); ++i) {
        if (g.isBoundaryNode(i)) continue;
        CHECK(lap[i] == doctest::Approx(sym * u[i]).epsilon(1e-10));
    }
}

TEST_CASE("one-sided flat Laplacian is exact on quadratics") {
    const auto g = ChartGrid::slab(3, {4, 4, 9}, {1.0, 1.0, 1.0});
    auto u = sample_field(g, [](const auto& x) { return x[2] * x[2]; });
    const auto lap = flat_laplacian_with_onesided_boundary(g, u);
    for (std::int64_t i = 0; i < g.nodeCount(); ++i)
        CHECK(lap[i] == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("conformal covariance of the full operator") {
    // L_ghat w = u^(1-p) L_g (u w) with ghat = u^(p-2) g must hold at the
    // stencil level, not merely to discretization order.
    const auto g = ChartGrid::slab(3, {6, 5, 8}, {1.0, 1.3, 0.9});
    auto psi = random_positive(g, 11);
    auto V = random_positive(g, 12, -3.0, 3.0);
    const auto m = ConformalMetric::withPotential(g, psi, V);
    auto u = random_positive(g, 13);
    auto w = random_positive(g, 14, -2.0, 2.0);
    const auto rescaled = m.rescaled(u);

    ScalarField uw(g);
    for (std::int64_t i = 0; i < g.nodeCount(); ++i) uw[i] = u[i] * w[i];
    const auto stiffBase = conformal_stiffness_apply(m, uw);
    const auto stiffHat = conformal_stiffness_apply(rescaled, w);
    const auto& Sbase = m.scalarCurvature();
    const auto& Shat = rescaled.scalarCurvature();
    const double pm1 = g.constants().p - 1.0;

    double scale = 0.0;
    for (std::int64_t i = 0; i < g.nodeCount(); ++i)
        scale = std::max(scale, std::abs(stiffBase[i]));
    for (std::int64_t i = 0; i < g.nodeCount(); ++i) {
        if (g.isBoundaryNode(i)) continue;
        const double lhs = stiffHat[i] + Shat[i] * w[i];
        const double rhs = std::pow(u[i], -pm1) * (stiffBase[i] + Sbase[i] * uw[i]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(scale));
    }
}

TEST_CASE("rescaling composes") {
    const auto g = ChartGrid::slab(3, {5, 5, 6}, {1.0, 1.0, 1.0});
    auto psi = random_positive(g, 21);
    const auto m = ConformalMetric::conformallyFlat(g, psi);
    auto u = random_positive(g, 22);
    auto v = random_positive(g, 23);
    ScalarField uv(g);
    for (std::int64_t i = 0; i < g.nodeCount(); ++i) uv[i] = u[i] * v[i];
    const auto twice = m.rescaled(u).rescaled(v);
    const auto once = m.rescaled(uv);
    for (std::int64_t i = 0; i < g.nodeCount(); ++i)
        CHECK(twice.factor()[i] == doctest::Approx(once.factor()[i]).epsilon(1e-14));
}

TEST_CASE("potential shifts curvature by psi^(2-p) V") {
    // With psi = 1 the pair (1, V) has S_g = V exactly.
    const auto g = ChartGrid::slab(3, {5, 5, 6}, {1.0, 1.0, 1.0});
    auto V = random_positive(g, 31, -10.0, 10.0);
    const auto m = ConformalMetric::flatWithPotential(g, V);
    CHECK(m.kindName() == "potential");
    for (std::int64_t i = 0; i < g.nodeCount(); ++i)
        CHECK(m.scalarCurvature()[i] == doctest::Approx(V[i]).epsilon(1e-14));
}

TEST_CASE("factor validation") {
    const auto g = ChartGrid::slab(3, {4, 4, 5}, {1.0, 1.0, 1.0});
    ScalarField bad(g, 1.0);
    bad[3] = 0.0;
    CHECK_THROWS_AS(ConformalMetric::conformallyFlat(g, bad), Error);
    bad[3] = -0.5;
    CHECK_THROWS_AS((void)ConformalMetric::flat(g).rescaled(bad), Error);
}

TEST_CASE("field samplers agree with direct evaluation") {
    const auto g = ChartGrid::slab(3, {4, 5, 6}, {2.0, 1.0, 1.5});
    auto f = sample_field(g, [](const auto& x) { return x[0] + 10.0 * x[1] + 100.0 * x[2]; });
    for (std::int64_t i = 0; i < g.nodeCount(); ++i) {
        const auto x = g.position(i);
        CHECK(f[i] == doctest::Approx(x[0] + 10.0 * x[1] + 100.0 * x[2]));
    }
    const auto bf = restrict_to_boundary(f);
    for (std::int64_t b = 0; b < g.boundaryNodeCount(); ++b)
        CHECK(bf[b] == f[g.boundaryToGrid(b)]);
}
