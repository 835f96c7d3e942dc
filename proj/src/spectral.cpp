#include "conflab/spectral.hpp"

#include <cmath>

#include "conflab/errors.hpp"

namespace conflab {

namespace {

SpectralResult run_eigensolve(const ConformalMetric& metric, Closure closure, double tolRel) {
    AssembledOperator op = assemble_operator(metric, closure, true);
    EigenSettings settings;
    settings.tolAbs = tolRel * op.opScale;
    EigenPair pair = smallest_eigenpair(op.A, op.mass, settings);

    SpectralResult result;
    result.value = pair.value;
    result.residual = pair.residual;
    result.iterations = pair.iterations;
    result.shift = pair.shift;
    result.opScale = op.opScale;
    result.mode = ScalarField(metric.grid(), 0.0);
    op.scatter(pair.vector, result.mode);

    double minActive = pair.vector.empty() ? 0.0 : pair.vector[0];
    for (double v : pair.vector)
        if (v < minActive) minActive = v;
    if (minActive <= 0.0)
        fail_numerical(
            "first eigenfunction is not strictly positive on the active nodes; "
            "the discrete maximum principle does not hold on this grid");
    return result;
}

int band_sign(double value, double eps) {
    if (value > eps) return 1;
    if (value < -eps) return -1;
    return 0;
}

}  // namespace

SpectralResult first_eigenvalue_robin(const ConformalMetric& metric, double tolRel) {
    return run_eigensolve(metric, Closure::Robin, tolRel);
}

SpectralResult first_eigenvalue_dirichlet(const ConformalMetric& metric, double tolRel) {
    if (!metric.grid().hasBoundary())
        fail_config("Dirichlet eigenvalue needs a slab grid");
    return run_eigensolve(metric, Closure::Dirichlet, tolRel);
}

SignReport make_sign_report(const SpectralResult& robin, const SpectralResult& dirichlet,
                            double epsSign) {
    SignReport report;
    report.robinValue = robin.value;
    report.dirichletValue = dirichlet.value;
    report.opScale = robin.opScale;
    report.epsSign = epsSign > 0.0 ? epsSign : 1e-6 * robin.opScale;
    report.robinSign = band_sign(robin.value, report.epsSign);
    report.dirichletSign = band_sign(dirichlet.value, report.epsSign);
    report.gap = dirichlet.value - robin.value;

    // The Robin infimum runs over a strictly larger test space, so the gap is
    // positive; both eigenvalues inside the band would mean the resolution
    // cannot separate them, which the gap bound rules out in practice.
    report.consistent = report.gap > 0.0 &&
                        !(report.robinSign == 0 && report.dirichletSign == 0) &&
                        report.robinSign <= report.dirichletSign;
    if (report.gap <= 0.0)
        fail_numerical("Dirichlet eigenvalue did not exceed the Robin eigenvalue");
    return report;
}

SignReport classify(const ConformalMetric& metric, double epsSign) {
    SpectralResult robin = first_eigenvalue_robin(metric);
    SpectralResult dirichlet = first_eigenvalue_dirichlet(metric);
    return make_sign_report(robin, dirichlet, epsSign);
}

InvarianceReport conformal_sign_invariance(const ConformalMetric& metric, const ScalarField& u,
                                           double epsSign) {
    ConformalMetric transformed = metric.rescaled(u);
    InvarianceReport report;
    report.base = classify(metric, epsSign);
    report.transformed = classify(transformed, epsSign);
    // Preservation is strict sign equality; the in-band flags only annotate
    // eigenvalues the resolution cannot separate from zero.
    report.robinIndeterminate =
        report.base.robinSign == 0 && report.transformed.robinSign == 0;
    report.dirichletIndeterminate =
        report.base.dirichletSign == 0 && report.transformed.dirichletSign == 0;
    report.robinPreserved = report.base.robinSign == report.transformed.robinSign;
    report.dirichletPreserved =
        report.base.dirichletSign == report.transformed.dirichletSign;
    return report;
}

}  // namespace conflab
