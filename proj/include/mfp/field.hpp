#pragma once

#include "mfp/activation.hpp"
#include "mfp/params.hpp"
#include "mfp/spectral.hpp"

#include <Eigen/Dense>

namespace mfp {

/// Quadrature set on [0,1]^d: points as columns, optional weights. Without
/// weights every point carries 1/n (Monte-Carlo average).
struct SampleBatch {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;

  int dim() const { return static_cast<int>(points.rows()); }
  int size() const { return static_cast<int>(points.cols()); }
  bool weighted() const { return weights.size() == points.cols(); }
  /// Weights as an explicit vector (1/n each when unweighted).
  Eigen::VectorXd effective_weights() const;
};

/// Sorts the batch columns lexicographically (weights follow their points).
void canonicalize(SampleBatch& batch);

/// Tensor-product Gauss-Legendre set with `level` points per axis (d <= 3,
/// level in [8, 256]), built from composite 8-point panels.
SampleBatch quadrature_batch(int dim, int level);

using Vec = Eigen::VectorXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

/// Phi_tau(theta; x) = c + a sigma_{H,tau}(w.x + b).
double feature(const Point& p, const VecRef& x, const MollifiedActivation& act);

/// Gradient in theta, packed as [c, a, w, b].
Vec feature_grad_theta(const Point& p, const VecRef& x,
                       const MollifiedActivation& act);

Vec feature_grad_x(const Point& p, const VecRef& x,
                   const MollifiedActivation& act);

/// d x (d+3) Jacobian of grad_x Phi with respect to the packed theta.
Eigen::MatrixXd feature_grad_x_theta(const Point& p, const VecRef& x,
                                     const MollifiedActivation& act);

double network_eval(const Cloud& cloud, const VecRef& x,
                    const MollifiedActivation& act);
Vec network_grad_x(const Cloud& cloud, const VecRef& x,
                   const MollifiedActivation& act);

/// Network value and x-gradient at every point of a point set.
struct NetworkFields {
  Eigen::VectorXd value;     // n
  Eigen::MatrixXd gradient;  // d x n
};
NetworkFields evaluate_network(const Cloud& cloud,
                               const Eigen::MatrixXd& points,
                               const MollifiedActivation& act);

/// sum_i w_i [ |grad u(x_i)|^2 / 2 - f(x_i) u(x_i) ] + (sum_i w_i u(x_i))^2 / 2
double empirical_loss(const Cloud& cloud, const SampleBatch& batch,
                      const CosineSeries& f, const MollifiedActivation& act);

/// Per-particle velocity of the empirical energy. `ambient.col(j)` is the
/// gradient of the loss in theta_j divided by the normalization scale (so it
/// equals m times the gradient under 1/m normalization); `tangent` is its
/// projection onto the tangent space of the parameter manifold.
struct VelocityReport {
  Eigen::MatrixXd ambient;  // (d+3) x m
  Eigen::MatrixXd tangent;  // (d+3) x m
  double loss_value = 0.0;
};

VelocityReport empirical_velocity(const Cloud& cloud, const SampleBatch& batch,
                                  const CosineSeries& f,
                                  const MollifiedActivation& act);

/// Energy by tensor Gauss-Legendre quadrature; throws for d > 3 or a level
/// outside [8, 256].
double quadrature_loss(const Cloud& cloud, const CosineSeries& f,
                       const MollifiedActivation& act, int level);

}  // namespace mfp
