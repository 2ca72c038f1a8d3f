#pragma once

#include <Eigen/Dense>

#include <functional>

namespace mfp {

/// Nodes and weights of a Gauss-Legendre rule mapped to [lo, hi].
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussRule gauss_legendre(int points, double lo = -1.0, double hi = 1.0);

/// Composite rule: `panels` equal sub-intervals of [lo, hi], each carrying a
/// `points_per_panel` Gauss-Legendre rule.
GaussRule composite_gauss_legendre(int panels, int points_per_panel, double lo,
                                   double hi);

/// Adaptive Gauss-Kronrod (7/15) integration to an absolute tolerance.
/// Throws std::runtime_error when the recursion depth is exhausted.
double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol = 1e-12,
                          int max_depth = 60);

/// One non-adaptive 15-point Kronrod pass; exact enough on panels where the
/// integrand is smooth and well resolved.
double kronrod15(const std::function<double(double)>& f, double lo, double hi);

}  // namespace mfp
