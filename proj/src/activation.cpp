#include "mfp/activation.hpp"

#include "mfp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mfp {

namespace {

double unnormalized_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double t = std::tan(0.5 * std::numbers::pi * s);
  return std::exp(-0.5 * t * t);
}

double unit_mollifier(double s) {
  return mollifier_normalization() * unnormalized_bump(s);
}

double unit_mollifier_slope(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double t = std::tan(0.5 * std::numbers::pi * s);
  const double r = unit_mollifier(s);
  if (r == 0.0) return 0.0;
  return -r * t * (1.0 + t * t) * 0.5 * std::numbers::pi;
}

// sigma_1(s) = int_{-1}^{s} rho(t) (s - t) dt for s in (-1, 1).
double unit_sigma_quadrature(double s) {
  return integrate_adaptive(
      [s](double t) { return unit_mollifier(t) * (s - t); }, -1.0, s, 1e-14);
}

double unit_cdf_quadrature(double s) {
  return integrate_adaptive(unit_mollifier, -1.0, s, 1e-14);
}

void check_tau(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
}

}  // namespace

double mollifier_normalization() {
  static const double z = 1.0 / (integrate_adaptive(unnormalized_bump, -1.0,
                                                    0.0, 1e-15) +
                                 integrate_adaptive(unnormalized_bump, 0.0, 1.0,
                                                    1e-15));
  return z;
}

double mollifier(double y, double tau) {
  check_tau(tau);
  return tau * unit_mollifier(tau * y);
}

double sigma_tau(double y, double tau) {
  check_tau(tau);
  const double s = tau * y;
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return y;
  return unit_sigma_quadrature(s) / tau;
}

double sigma_tau_deriv(double y, double tau, int order) {
  check_tau(tau);
  const double s = tau * y;
  switch (order) {
    case 1:
      if (s <= -1.0) return 0.0;
      if (s >= 1.0) return 1.0;
      return unit_cdf_quadrature(s);
    case 2:
      return mollifier(y, tau);
    default:
      throw std::invalid_argument("sigma_tau_deriv: order must be 1 or 2");
  }
}

double hat(double y) { return relu(y + 1.0) - relu(2.0 * y) + relu(y - 1.0); }

double hat_slope(double y) {
  auto step = [](double z) { return z > 0.0 ? 1.0 : 0.0; };
  return step(y + 1.0) - 2.0 * step(2.0 * y) + step(y - 1.0);
}

double hat_tau(double y, double tau, int order) {
  check_tau(tau);
  if (std::abs(y) >= 1.0 + 1.0 / tau) return 0.0;
  switch (order) {
    case 0:
      return sigma_tau(y + 1.0, tau) - sigma_tau(2.0 * y, tau) +
             sigma_tau(y - 1.0, tau);
    case 1:
      return sigma_tau_deriv(y + 1.0, tau, 1) -
             2.0 * sigma_tau_deriv(2.0 * y, tau, 1) +
             sigma_tau_deriv(y - 1.0, tau, 1);
    case 2:
      return mollifier(y + 1.0, tau) - 4.0 * mollifier(2.0 * y, tau) +
             mollifier(y - 1.0, tau);
    default:
      throw std::invalid_argument("hat_tau: order must be 0, 1 or 2");
  }
}

double h1_distance_hat(double tau, int quad_points) {
  if (quad_points < 16) {
    throw std::invalid_argument("h1_distance_hat: quad_points < 16");
  }
  if (!(tau >= 1.0)) throw std::invalid_argument("h1_distance_hat: tau < 1");
  if (std::isinf(tau)) return 0.0;

  const MollifiedActivation act(tau);
  const double r = 1.0 / tau;
  std::vector<double> cuts = {-2.0,  -1.0 - r,     -1.0, -1.0 + r,
                              -0.5 * r, 0.0,      0.5 * r, 1.0 - r,
                              1.0,   1.0 + r,     2.0};
  for (double& c : cuts) c = std::clamp(c, -2.0, 2.0);
  std::sort(cuts.begin(), cuts.end());

  const int per_panel = 8;
  const int panels = std::max(1, quad_points / per_panel);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    const GaussRule rule =
        composite_gauss_legendre(panels, per_panel, cuts[i], cuts[i + 1]);
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
      const double y = rule.nodes[q];
      const HatJet jet = act.hat_jet(y);
      const double dv = jet.value - hat(y);
      const double ds = jet.slope - hat_slope(y);
      sum += rule.weights[q] * (dv * dv + ds * ds);
    }
  }
  return std::sqrt(sum);
}

MollifiedActivation::MollifiedActivation(double tau, int table_resolution)
    : tau_(tau),
      z_(mollifier_normalization()),
      resolution_(table_resolution),
      regularized_(!std::isinf(tau)),
      support_(1.0 + (std::isinf(tau) ? 0.0 : 1.0 / tau)),
      step_(2.0 / table_resolution),
      inv_step_(0.5 * table_resolution) {
  check_tau(tau);
  if (table_resolution < 16) {
    throw std::invalid_argument("MollifiedActivation: table_resolution < 16");
  }
  if (!regularized_) return;

  // Cumulative panel integrals of rho and t*rho; each panel is tiny relative
  // to the scale of rho, so a single Kronrod pass is at roundoff level.
  table_.resize(static_cast<std::size_t>(resolution_) + 1);
  double cdf = 0.0;
  double first_moment = 0.0;
  for (int i = 0; i <= resolution_; ++i) {
    const double s = (i == resolution_) ? 1.0 : -1.0 + i * step_;
    if (i > 0) {
      const double lo = -1.0 + (i - 1) * step_;
      cdf += kronrod15(unit_mollifier, lo, s);
      first_moment +=
          kronrod15([](double t) { return t * unit_mollifier(t); }, lo, s);
    }
    table_[i] = Knot{s * cdf - first_moment, cdf, unit_mollifier(s),
                     unit_mollifier_slope(s)};
  }
}

HatJet MollifiedActivation::relu_jet(double y) const {
  if (!regularized_) return {relu(y), y > 0.0 ? 1.0 : 0.0, 0.0};
  const double s = tau_ * y;
  if (s <= -1.0) return {};
  if (s >= 1.0) return {y, 1.0, 0.0};

  const double u = (s + 1.0) * inv_step_;
  const int i = std::min(static_cast<int>(u), resolution_ - 1);
  const double t = u - i;
  const Knot& k0 = table_[i];
  const Knot& k1 = table_[i + 1];

  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = (t3 - 2.0 * t2 + t) * step_;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = (t3 - t2) * step_;

  const double sig = h00 * k0.d0 + h10 * k0.d1 + h01 * k1.d0 + h11 * k1.d1;
  const double cdf = h00 * k0.d1 + h10 * k0.d2 + h01 * k1.d1 + h11 * k1.d2;
  const double rho = h00 * k0.d2 + h10 * k0.d3 + h01 * k1.d2 + h11 * k1.d3;
  return {sig / tau_, cdf, tau_ * rho};
}

double MollifiedActivation::sigma(double y) const { return relu_jet(y).value; }
double MollifiedActivation::sigma_d1(double y) const {
  return relu_jet(y).slope;
}
double MollifiedActivation::sigma_d2(double y) const {
  return relu_jet(y).curvature;
}

HatJet MollifiedActivation::hat_jet(double y) const {
  if (std::abs(y) >= support_) return {};
  const HatJet left = relu_jet(y + 1.0);
  const HatJet mid = relu_jet(2.0 * y);
  const HatJet right = relu_jet(y - 1.0);
  return {left.value - mid.value + right.value,
          left.slope - 2.0 * mid.slope + right.slope,
          left.curvature - 4.0 * mid.curvature + right.curvature};
}

double MollifiedActivation::hat(double y, int order) const {
  const HatJet jet = hat_jet(y);
  switch (order) {
    case 0:
      return jet.value;
    case 1:
      return jet.slope;
    case 2:
      return jet.curvature;
    default:
      throw std::invalid_argument("MollifiedActivation::hat: order must be 0..2");
  }
}

}  // namespace mfp
