#include "mfp/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfp {

Eigen::VectorXd fd_gradient(const Cloud& cloud, const SampleBatch& batch,
                            const CosineSeries& f,
                            const MollifiedActivation& act, int particle,
                            double h) {
  if (!(h >= 1e-7 && h <= 1e-3)) {
    throw std::invalid_argument("fd_gradient: h must lie in [1e-7, 1e-3]");
  }
  if (particle < 0 || particle >= cloud.size()) {
    throw std::out_of_range("fd_gradient: particle index");
  }
  const Point base = cloud.particle(particle);
  const Eigen::VectorXd theta = base.packed();
  Eigen::VectorXd grad(theta.size());
  Cloud probe = cloud;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd shifted = theta;
    shifted[k] = theta[k] + h;
    probe.set_particle(particle, Point::unpack(shifted));
    const double up = empirical_loss(probe, batch, f, act);
    shifted[k] = theta[k] - h;
    probe.set_particle(particle, Point::unpack(shifted));
    const double down = empirical_loss(probe, batch, f, act);
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

GridFunction fd_poisson_1d(const CosineSeries& f, int grid_n) {
  if (f.dim() != 1) throw std::invalid_argument("fd_poisson_1d: needs d = 1");
  if (grid_n < 16) throw std::invalid_argument("fd_poisson_1d: grid_n < 16");
  if (!f.mean_zero()) {
    throw std::domain_error(
        "fd_poisson_1d: singular system, source has nonzero mean");
  }
  const int n = grid_n;
  const double h = 1.0 / n;
  GridFunction out{Eigen::VectorXd::LinSpaced(n + 1, 0.0, 1.0),
                   Eigen::VectorXd::Zero(n + 1)};
  Eigen::VectorXd rhs(n + 1);
  for (int i = 0; i <= n; ++i) {
    rhs[i] = h * h * f(Eigen::Matrix<double, 1, 1>(out.x[i]));
  }

  // Rows: i = 0: 2u0 - 2u1; interior: -u_{i-1} + 2u_i - u_{i+1};
  // i = n: -2u_{n-1} + 2u_n. Pin u_0 = 0 and sweep rows 1..n (Thomas).
  // Row 0 is then the compatibility condition.
  std::vector<double> sub(n + 1, -1.0), diag(n + 1, 2.0), sup(n + 1, -1.0);
  sub[n] = -2.0;
  Eigen::VectorXd d = rhs;
  // Unknowns u_1..u_n; u_0 = 0 drops out of row 1.
  std::vector<double> cp(n + 1), dp(n + 1);
  cp[1] = sup[1] / diag[1];
  dp[1] = d[1] / diag[1];
  for (int i = 2; i <= n; ++i) {
    const double denom = diag[i] - sub[i] * cp[i - 1];
    if (std::abs(denom) < 1e-300) {
      throw std::domain_error("fd_poisson_1d: singular tridiagonal system");
    }
    cp[i] = i < n ? sup[i] / denom : 0.0;
    dp[i] = (d[i] - sub[i] * dp[i - 1]) / denom;
  }
  out.u[n] = dp[n];
  for (int i = n - 1; i >= 1; --i) out.u[i] = dp[i] - cp[i] * out.u[i + 1];
  out.u[0] = 0.0;

  // Residual of the dropped row measures the discrete compatibility of f.
  const double residual = 2.0 * out.u[0] - 2.0 * out.u[1] - d[0];
  const double scale = d.cwiseAbs().maxCoeff() + 1e-300;
  if (std::abs(residual) > 1e-8 * scale * n) {
    throw std::domain_error(
        "fd_poisson_1d: singular system, source violates compatibility");
  }

  // Zero trapezoidal mean.
  double mean = 0.5 * (out.u[0] + out.u[n]);
  for (int i = 1; i < n; ++i) mean += out.u[i];
  mean *= h;
  out.u.array() -= mean;
  return out;
}

double analytic_energy(const CosineSeries& u_star) {
  if (!u_star.mean_zero()) {
    throw std::invalid_argument("analytic_energy: series has a k = 0 term");
  }
  constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
  double sum = 0.0;
  for (const auto& [k, coeff] : u_star.terms()) {
    double k2 = 0.0;
    for (int v : k) k2 += static_cast<double>(v) * v;
    sum += coeff * coeff * kPi2 * k2 * std::ldexp(1.0, -nonzero_count(k));
  }
  return -0.5 * sum;
}

Cloud hat_interpolant_1d(const CosineSeries& target, int m, double tau) {
  if (target.dim() != 1) {
    throw std::invalid_argument("hat_interpolant_1d: needs d = 1");
  }
  if (m < 4) throw std::invalid_argument("hat_interpolant_1d: m < 4");

  // On [0,1], hat(x - x_j) = 1 - |x - x_j|, so the interpolant is
  // C + sum_j g_j |x - x_j| with g_j half the slope jump at interior nodes.
  const double h = 1.0 / (m - 1);
  Eigen::VectorXd nodes = Eigen::VectorXd::LinSpaced(m, 0.0, 1.0);
  Eigen::VectorXd vals(m);
  for (int j = 0; j < m; ++j) {
    vals[j] = target(Eigen::Matrix<double, 1, 1>(nodes[j]));
  }
  Eigen::VectorXd slopes = (vals.tail(m - 1) - vals.head(m - 1)) / h;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  for (int j = 1; j + 1 < m; ++j) g[j] = 0.5 * (slopes[j] - slopes[j - 1]);
  // First-segment slope: g_0 - sum_{j>=1} g_j; keep g_{m-1} = 0.
  g[0] = slopes[0] + g.segment(1, m - 1).sum();

  // Constant so the interpolant matches the target at x = 0.
  double at_zero = 0.0;
  for (int j = 0; j < m; ++j) at_zero += g[j] * nodes[j];
  const double offset = vals[0] - at_zero;

  // u = (1/m) sum_j [c + a_j (1 - |x - x_j|)]  =>  a_j = -m g_j and
  // c = offset - (1/m) sum_j a_j.
  Cloud cloud(1, m, tau);
  cloud.a = -static_cast<double>(m) * g;
  cloud.c.setConstant(offset - cloud.a.sum() / m);
  cloud.w.setOnes();
  cloud.b = -nodes;
  return cloud;
}

}  // namespace mfp
