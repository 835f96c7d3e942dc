// Timing comparison of the OpenMP kernels against their serial references:
// stencil application, sparse matvec, and the blocked reductions.  Not a
// test; prints a table and exits 0.
//
//   bench_kernels [nodes-per-side]   (default 48, slab n = 3)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "conflab/assemble.hpp"
#include "conflab/field.hpp"
#include "conflab/grid.hpp"
#include "conflab/metric.hpp"
#include "conflab/parallel.hpp"
#include "conflab/sparse.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace conflab;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& body, int repeats) {
    body();  // warm up
    const auto t0 = Clock::now();
    for (int r = 0; r < repeats; ++r) body();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void row(const char* name, double serialMs, double parallelMs) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serialMs, parallelMs,
                serialMs / parallelMs);
}

}  // namespace

int main(int argc, char** argv) {
    const int m = argc > 1 ? std::atoi(argv[1]) : 48;
    if (m < 4) {
        std::fprintf(stderr, "side must be at least 4\n");
        return 2;
    }
    const auto grid = ChartGrid::slab(3, {m, m, m + 1}, {1.0, 1.0, 1.0});

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    ScalarField psi(grid);
    ScalarField u(grid);
    for (std::int64_t i = 0; i < grid.nodeCount(); ++i) {
        psi[i] = dist(rng);
        u[i] = dist(rng);
    }
    const auto metric = ConformalMetric::conformallyFlat(grid, psi);
    const auto op = assemble_operator(metric, Closure::Robin);

    std::vector<double> x(static_cast<std::size_t>(op.A.cols));
    for (auto& v : x) v = dist(rng);
    std::vector<double> y;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("grid %dx%dx%d (%lld nodes), %d thread(s)\n", m, m, m + 1,
                static_cast<long long>(grid.nodeCount()), threads);
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    const int reps = 20;
    row("stencil apply",
        time_ms([&] { (void)serial::conformal_stiffness_apply(metric, u); }, reps),
        time_ms([&] { (void)conformal_stiffness_apply(metric, u); }, reps));
    row("csr matvec",
        time_ms([&] { serial::matvec(op.A, x, y); }, reps),
        time_ms([&] { op.A.apply(x, y); }, reps));
    row("dot product",
        time_ms([&] { (void)serial::dot(x, x); }, reps),
        time_ms([&] { (void)det_dot(x, x); }, reps));
    row("sup-norm",
        time_ms([&] { (void)serial::sup_abs(x); }, reps),
        time_ms([&] { (void)sup_abs(x); }, reps));
    return 0;
}
