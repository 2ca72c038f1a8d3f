#pragma once

// Independent references used to validate the solver: finite-difference
// gradients, a classical 1D Neumann solver, closed-form energies and a hat
// interpolant that builds known-good clouds.

#include "mfp/activation.hpp"
#include "mfp/field.hpp"
#include "mfp/params.hpp"
#include "mfp/spectral.hpp"

#include <Eigen/Dense>

namespace mfp {

/// Central differences of empirical_loss in every ambient coordinate
/// [c, a, w, b] of one particle. w is perturbed without renormalization.
/// Requires h in [1e-7, 1e-3].
Eigen::VectorXd fd_gradient(const Cloud& cloud, const SampleBatch& batch,
                            const CosineSeries& f,
                            const MollifiedActivation& act, int particle,
                            double h);

struct GridFunction {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
};

/// Second-order finite differences for -u'' = f on [0,1] with homogeneous
/// Neumann data (ghost points), on grid_n + 1 nodes, normalized to zero
/// trapezoidal mean. Throws std::domain_error when f is incompatible
/// (nonzero mean).
GridFunction fd_poisson_1d(const CosineSeries& f, int grid_n);

/// Minimum energy -1/2 int |grad u*|^2 of a mean-zero cosine series.
double analytic_energy(const CosineSeries& u_star);

/// Cloud (w = 1, b = -x_j at nodes x_j = j/(m-1)) whose network equals the
/// piecewise-linear interpolant of `target` on [0,1], up to mollification.
/// The mollification error is small once tau >> m.
Cloud hat_interpolant_1d(const CosineSeries& target, int m, double tau);

}  // namespace mfp
