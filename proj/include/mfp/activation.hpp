#pragma once

#include <vector>

namespace mfp {

// ReLU, the compactly supported mollifier, and its convolution with the ReLU.
//
// The mollifier on [-1, 1] is rho(s) = Z exp(-tan(pi s / 2)^2 / 2), rescaled
// as rho_tau(y) = tau rho(tau y). Every tau-dependent quantity reduces to the
// unit profile through sigma_tau(y) = sigma_1(tau y) / tau, so one table over
// s in [-1, 1] serves every tau.

inline double relu(double y) { return y > 0.0 ? y : 0.0; }

/// Normalization constant Z of the mollifier. Computed once per process.
double mollifier_normalization();

double mollifier(double y, double tau);

/// sigma_tau evaluated by adaptive quadrature of the convolution.
double sigma_tau(double y, double tau);

/// First (order 1) or second (order 2) derivative of sigma_tau, by quadrature.
/// Throws std::invalid_argument for any other order.
double sigma_tau_deriv(double y, double tau, int order);

/// Hat ReLU sigma(y + 1) - sigma(2y) + sigma(y - 1).
double hat(double y);
double hat_slope(double y);

/// Regularized hat and its first two derivatives, by quadrature.
double hat_tau(double y, double tau, int order);

/// H^1(R) distance between the hat and its regularization, by composite
/// Gauss-Legendre quadrature over [-2, 2] split at every kink and window edge.
/// Requires tau >= 1 (tau = +inf gives 0) and quad_points >= 16.
double h1_distance_hat(double tau, int quad_points);

struct HatJet {
  double value = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
};

/// Tabulated regularized ReLU / hat for the training hot loop.
///
/// Three cubic Hermite tables over the unit profile hold sigma_1, its slope
/// and rho, each with the next derivative as Hermite slope data. Values agree
/// with the quadrature path to better than 1e-8. tau = +inf selects the plain
/// (unregularized) hat. Immutable after construction.
class MollifiedActivation {
 public:
  explicit MollifiedActivation(double tau = 4.0, int table_resolution = 4096);

  double tau() const { return tau_; }
  double z_const() const { return z_; }
  int table_resolution() const { return resolution_; }
  bool regularized() const { return regularized_; }

  double sigma(double y) const;
  double sigma_d1(double y) const;
  double sigma_d2(double y) const;

  /// Half-width of the hat support: 1 + 1/tau.
  double support_radius() const { return support_; }

  HatJet hat_jet(double y) const;
  double hat(double y, int order = 0) const;

 private:
  struct Knot {
    double d0;  // sigma_1
    double d1;  // sigma_1' = CDF of rho
    double d2;  // rho
    double d3;  // rho'
  };
  // (sigma_tau, sigma_tau', rho_tau) at y.
  HatJet relu_jet(double y) const;

  double tau_;
  double z_;
  int resolution_;
  bool regularized_;
  double support_;
  double step_;
  double inv_step_;
  std::vector<Knot> table_;
};

}  // namespace mfp
