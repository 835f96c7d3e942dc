#pragma once

#include "conflab/assemble.hpp"
#include "conflab/eigensolve.hpp"
#include "conflab/field.hpp"
#include "conflab/metric.hpp"

namespace conflab {

/// First eigenvalue plus its mode as a grid field (zero-extended to the
/// boundary for the Dirichlet problem).
struct SpectralResult {
    double value = 0.0;
    ScalarField mode;
    double residual = 0.0;
    std::int64_t iterations = 0;
    double shift = 0.0;
    double opScale = 0.0;
};

/// First eigenvalue of the conformal Laplacian with the conformally natural
/// Robin condition dphi/dnu + (2/(p-2)) h_g phi = 0.  The mode is checked to
/// be strictly positive everywhere (first-eigenfunction positivity); a sign
/// change reports a numerical failure.
SpectralResult first_eigenvalue_robin(const ConformalMetric& metric, double tolRel = 1e-11);

/// First Dirichlet eigenvalue; mode strictly positive on the interior.
SpectralResult first_eigenvalue_dirichlet(const ConformalMetric& metric, double tolRel = 1e-11);

/// Sign classification of a conformal class through both first eigenvalues.
/// Values within epsSign of zero classify as zero ("indeterminate at this
/// resolution") rather than being forced to a side.
struct SignReport {
    double robinValue = 0.0;
    double dirichletValue = 0.0;
    int robinSign = 0;      // -1, 0, +1
    int dirichletSign = 0;
    double epsSign = 0.0;
    double gap = 0.0;       // dirichletValue - robinValue, strictly positive
    double opScale = 0.0;
    bool consistent = false;
};

/// Classify the metric's conformal class.  epsSign <= 0 selects the default
/// band 1e-6 * operator scale.  Verifies the order relation between the two
/// eigenvalues and that they are not both inside the zero band.
SignReport classify(const ConformalMetric& metric, double epsSign = 0.0);

/// Assemble the report from already-computed first eigenpairs (same checks as
/// classify; lets callers reuse the mode vectors).
SignReport make_sign_report(const SpectralResult& robin, const SpectralResult& dirichlet,
                            double epsSign = 0.0);

/// Both classifications across a conformal change g -> u^(p-2) g, with the
/// sign-match verdicts.  Preservation is strict sign equality (zero band
/// included); the indeterminate flags mark pairs both inside the band.
struct InvarianceReport {
    SignReport base;
    SignReport transformed;
    bool robinPreserved = false;
    bool dirichletPreserved = false;
    bool robinIndeterminate = false;
    bool dirichletIndeterminate = false;
};

InvarianceReport conformal_sign_invariance(const ConformalMetric& metric, const ScalarField& u,
                                           double epsSign = 0.0);

}  // namespace conflab
