#pragma once

#include <string>

#include "conflab/field.hpp"
#include "conflab/grid.hpp"

namespace conflab {

/// Discretized metric on a chart grid, with its derived geometric data.
///
/// The metric is a pair (psi, V): a conformal factor psi > 0 over the flat
/// chart plus an optional synthetic potential V.  The conformal Laplacian of
/// the pair is
///   L_(psi,V) w = psi^(1-p) (-a Lap_delta + V)(psi w)
///               = -a Lap_g w + S_g w,  S_g = psi^(1-p) (-a Lap_delta psi + V psi),
/// so pairs compose exactly under a conformal change u: (psi, V) -> (psi u, V).
/// V = 0 is an honest conformally flat metric; V != 0 is a diagnostic object
/// whose "curvature" can take either sign (a pure factor over the flat slab
/// cannot leave the flat class's sign pattern).
///
/// Derived quantities, evaluated once at construction:
///   scalarCurvature   S_g as above; boundary entries use one-sided second
///                     differences along the normal and are flagged
///                     extrapolated when psi is not identically 1
///   meanCurvature     h_g = (2/(n-2)) psi^(-n/(n-2)) dpsi/dnu, one-sided
///                     second-order normal slope
///   volumeWeight      psi^p * (flat dual-cell volume); the dual cell is
///                     halved along the normal at the two faces, so weights
///                     sum to the exact metric volume of the slab
///   boundaryAreaWeight psi^(a/2) * lateral cell area
///
/// The Laplace-Beltrami stencil uses the conductivity psi_j*psi_k on the edge
/// (j,k) (geometric mean of the nodal psi^2).  With scalarCurvature defined
/// through the same flat stencil, the covariance identity above holds exactly
/// at interior nodes, not just to discretization order; the curvature
/// round-trip checks rely on that.
class ConformalMetric {
public:
    static ConformalMetric flat(const ChartGrid& grid);
    static ConformalMetric conformallyFlat(const ChartGrid& grid, ScalarField psi);
    static ConformalMetric flatWithPotential(const ChartGrid& grid, ScalarField V);
    static ConformalMetric withPotential(const ChartGrid& grid, ScalarField psi, ScalarField V);

    const ChartGrid& grid() const { return *grid_; }
    bool hasPotential() const { return hasPotential_; }
    bool flatFactor() const { return flatFactor_; }
    /// "flat", "conformal", "potential", or "conformal-potential".
    std::string kindName() const;

    /// Conformal factor; identically 1 unless constructed otherwise.
    const ScalarField& factor() const { return psi_; }
    /// Synthetic potential; identically 0 unless constructed otherwise.
    const ScalarField& potential() const { return potential_; }
    const ScalarField& scalarCurvature() const { return scalarCurvature_; }
    const BoundaryField& meanCurvature() const { return meanCurvature_; }
    const std::vector<double>& volumeWeight() const { return volumeWeight_; }
    const std::vector<double>& boundaryAreaWeight() const { return areaWeight_; }

    /// Edge conductivity between adjacent nodes (psi_j psi_k; 1 when flat).
    double edgeFactor(std::int64_t j, std::int64_t k) const {
        return psi_[j] * psi_[k];
    }

    /// Conformal change g -> u^(p-2) g: factor psi u, potential carried over.
    ConformalMetric rescaled(const ScalarField& u) const;

private:
    ConformalMetric(const ChartGrid& grid, ScalarField psi, ScalarField potential,
                    bool flatFactor, bool hasPotential);

    const ChartGrid* grid_;
    ScalarField psi_;
    ScalarField potential_;
    bool flatFactor_ = true;
    bool hasPotential_ = false;
    ScalarField scalarCurvature_;
    BoundaryField meanCurvature_;
    std::vector<double> volumeWeight_;
    std::vector<double> areaWeight_;
};

/// -a Lap_g u at interior nodes (all nodes on a torus grid); entries at slab
/// boundary nodes are left at zero.
ScalarField conformal_stiffness_apply(const ConformalMetric& metric, const ScalarField& u);

/// Lap_g u at interior nodes, divergence form.  Boundary entries zero.
ScalarField laplace_beltrami(const ConformalMetric& metric, const ScalarField& u);

/// Flat Laplacian of a field, one-sided second-order along the normal at the
/// two faces (used for curvature evaluation, where boundary values are
/// extrapolated rather than part of the operator).
ScalarField flat_laplacian_with_onesided_boundary(const ChartGrid& grid, const ScalarField& u);

namespace serial {
/// Reference stencil application, plain node loop, no OpenMP.
ScalarField conformal_stiffness_apply(const ConformalMetric& metric, const ScalarField& u);
}  // namespace serial

}  // namespace conflab
