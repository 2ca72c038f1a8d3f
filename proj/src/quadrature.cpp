#include "mfp/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfp {

namespace {

// Kronrod 15-point abscissae (positive half) and weights, with the embedded
// Gauss 7-point weights on the odd entries.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct KronrodResult {
  double value;
  double error;
};

KronrodResult kronrod_pass(const std::function<double(double)>& f, double lo,
                           double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double result_k = fc * kWgk[7];
  double result_g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    result_k += kWgk[j] * sum;
    if (j % 2 == 1) result_g += kWg[j / 2] * sum;
  }
  return {result_k * half, std::abs((result_k - result_g) * half)};
}

double adaptive(const std::function<double(double)>& f, double lo, double hi,
                double tol, int depth, KronrodResult whole) {
  if (whole.error <= tol) return whole.value;
  if (depth <= 0) {
    throw std::runtime_error("integrate_adaptive: recursion depth exhausted");
  }
  const double mid = 0.5 * (lo + hi);
  const auto left = kronrod_pass(f, lo, mid);
  const auto right = kronrod_pass(f, mid, hi);
  // Halving the tolerance per side keeps the global budget bounded.
  return adaptive(f, lo, mid, 0.5 * tol, depth - 1, left) +
         adaptive(f, mid, hi, 0.5 * tol, depth - 1, right);
}

}  // namespace

GaussRule gauss_legendre(int points, double lo, double hi) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: points < 1");
  GaussRule rule{Eigen::VectorXd(points), Eigen::VectorXd(points)};
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  const double half = 0.5 * (hi - lo);
  rule.nodes = (rule.nodes.array() * half + 0.5 * (lo + hi)).matrix();
  rule.weights *= half;
  return rule;
}

GaussRule composite_gauss_legendre(int panels, int points_per_panel, double lo,
                                   double hi) {
  if (panels < 1) throw std::invalid_argument("composite rule: panels < 1");
  const GaussRule ref = gauss_legendre(points_per_panel);
  const int q = points_per_panel;
  GaussRule rule{Eigen::VectorXd(panels * q), Eigen::VectorXd(panels * q)};
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    rule.nodes.segment(p * q, q) =
        ((ref.nodes.array() + 1.0) * (0.5 * width) + a).matrix();
    rule.weights.segment(p * q, q) = ref.weights * (0.5 * width);
  }
  return rule;
}

double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol, int max_depth) {
  if (lo == hi) return 0.0;
  return adaptive(f, lo, hi, abs_tol, max_depth, kronrod_pass(f, lo, hi));
}

double kronrod15(const std::function<double(double)>& f, double lo,
                 double hi) {
  return kronrod_pass(f, lo, hi).value;
}

}  // namespace mfp
