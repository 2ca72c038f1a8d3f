#include "mfp/checks.hpp"

#include "mfp/activation.hpp"
#include "mfp/field.hpp"
#include "mfp/flow.hpp"
#include "mfp/oracle.hpp"
#include "mfp/quadrature.hpp"
#include "mfp/rng.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mfp {

namespace {

using Check = std::function<std::pair<bool, std::string>()>;

CheckResult timed(const std::string& name, const Check& check) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = name;
  try {
    std::tie(r.passed, r.detail) = check();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  return r;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Cloud random_cloud(int m, int d, double tau, Engine& rng) {
  Cloud cloud = init_cloud(m, d, rng(), tau);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int j = 0; j < m; ++j) {
    cloud.c[j] = g(rng);
    cloud.a[j] = 2.0 * g(rng);
  }
  return cloud;
}

SampleBatch random_batch(int d, int n, Engine& rng) {
  return SampleBatch{generate_dataset(d, n, rng()), {}};
}

std::vector<CheckResult> activation_checks() {
  std::vector<CheckResult> out;
  out.push_back(timed("sigma_tau exact outside window", [] {
    for (double tau : {1.0, 4.0, 16.0}) {
      const MollifiedActivation act(tau);
      for (int i = 0; i < 1000; ++i) {
        const double off = (1.0 + 5.0 * i / 999.0) / tau;
        if (act.sigma(-off) != 0.0 || sigma_tau(-off, tau) != 0.0) {
          return std::pair{false, "nonzero below -1/tau at tau=" + fmt(tau)};
        }
        if (act.sigma(off) != off || sigma_tau(off, tau) != off) {
          return std::pair{false, "not identity above 1/tau at tau=" + fmt(tau)};
        }
      }
    }
    return std::pair{true, std::string("1000 points x 3 tau")};
  }));
  out.push_back(timed("mollifier integrates to one", [] {
    double worst = 0.0;
    for (double tau : {1.0, 4.0, 64.0}) {
      const double integral = integrate_adaptive(
          [tau](double y) { return mollifier(y, tau); }, -1.0 / tau, 1.0 / tau,
          1e-13);
      worst = std::max(worst, std::abs(integral - 1.0));
    }
    return std::pair{worst <= 1e-10, "max |int - 1| = " + fmt(worst)};
  }));
  out.push_back(timed("table agrees with quadrature", [] {
    const MollifiedActivation act(4.0);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double y = -0.3 + 0.6 * i / 200.0;
      worst = std::max(worst, std::abs(act.sigma(y) - sigma_tau(y, 4.0)));
      worst = std::max(worst,
                       std::abs(act.sigma_d1(y) - sigma_tau_deriv(y, 4.0, 1)));
      worst = std::max(worst,
                       std::abs(act.sigma_d2(y) - sigma_tau_deriv(y, 4.0, 2)));
    }
    return std::pair{worst < 1e-8, "max deviation " + fmt(worst)};
  }));
  out.push_back(timed("H1 distance rate", [] {
    std::vector<double> taus = {4, 16, 64, 256}, dist;
    for (double t : taus) dist.push_back(h1_distance_hat(t, 256));
    const double slope = loglog_slope(taus, dist);
    return std::pair{std::abs(slope + 0.5) <= 0.15, "slope " + fmt(slope)};
  }));
  out.push_back(timed("hat slope matches finite differences", [] {
    const MollifiedActivation act(4.0);
    Engine rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double y = u(rng);
      const double fd = (act.hat(y + 1e-5) - act.hat(y - 1e-5)) / 2e-5;
      const double an = act.hat(y, 1);
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    return std::pair{worst < 1e-6, "max rel error " + fmt(worst)};
  }));
  return out;
}

std::vector<CheckResult> gradient_checks() {
  std::vector<CheckResult> out;
  out.push_back(timed("velocity equals m x FD gradient", [] {
    Engine rng(11);
    double worst = 0.0;
    for (int d : {1, 2, 5}) {
      const MollifiedActivation act(4.0);
      Cloud cloud = random_cloud(8, d, 4.0, rng);
      const SampleBatch batch = random_batch(d, 40, rng);
      MultiIndex k(d, 0);
      k[0] = 1;
      const CosineSeries f = make_source(k);
      const VelocityReport rep = empirical_velocity(cloud, batch, f, act);
      for (int j = 0; j < cloud.size(); ++j) {
        const Eigen::VectorXd fd =
            fd_gradient(cloud, batch, f, act, j, 1e-5) * cloud.size();
        const double err = (fd - rep.ambient.col(j)).norm() /
                           std::max(1e-12, rep.ambient.col(j).norm());
        worst = std::max(worst, err);
      }
    }
    return std::pair{worst < 1e-6, "max rel error " + fmt(worst)};
  }));
  out.push_back(timed("boundary particles are frozen", [] {
    Engine rng(13);
    double worst = 0.0;
    for (int d : {1, 3}) {
      const MollifiedActivation act(4.0);
      Cloud cloud = random_cloud(6, d, 4.0, rng);
      cloud.b[0] = bias_bound(d);
      cloud.b[1] = -bias_bound(d);
      MultiIndex k(d, 0);
      k[0] = 1;
      const VelocityReport rep = empirical_velocity(
          cloud, random_batch(d, 50, rng), make_source(k), act);
      for (int j : {0, 1}) {
        worst = std::max(worst, rep.ambient.col(j).tail(d + 2).cwiseAbs().maxCoeff());
      }
    }
    return std::pair{worst <= 1e-12, "max |v_(a,w,b)| = " + fmt(worst)};
  }));
  return out;
}

std::vector<CheckResult> oracle_checks() {
  std::vector<CheckResult> out;
  out.push_back(timed("fd_poisson_1d second-order convergence", [] {
    std::vector<double> hs, errs;
    for (int n : {64, 128, 256, 512}) {
      const GridFunction g = fd_poisson_1d(make_source({1}), n);
      double err = 0.0;
      for (Eigen::Index i = 0; i < g.x.size(); ++i) {
        err = std::max(err,
                       std::abs(g.u[i] - std::cos(std::numbers::pi * g.x[i])));
      }
      hs.push_back(1.0 / n);
      errs.push_back(err);
    }
    const double order = loglog_slope(hs, errs);
    return std::pair{std::abs(order - 2.0) <= 0.2, "order " + fmt(order)};
  }));
  out.push_back(timed("hat interpolant energy", [] {
    const int m = 64;
    const Cloud cloud = hat_interpolant_1d(
        exact_solution(make_source({1})), m, 4.0 * m);
    const MollifiedActivation act(cloud.tau);
    const double e = quadrature_loss(cloud, make_source({1}), act, 256);
    const double target = -std::numbers::pi * std::numbers::pi / 4.0;
    const double rel = std::abs(e / target - 1.0);
    return std::pair{rel < 0.01, "energy " + fmt(e) + ", rel dev " + fmt(rel)};
  }));
  return out;
}

}  // namespace

std::vector<CheckResult> run_checks(const std::string& what) {
  std::vector<CheckResult> out;
  auto append = [&out](std::vector<CheckResult> more) {
    out.insert(out.end(), more.begin(), more.end());
  };
  if (what == "activation" || what == "all") append(activation_checks());
  if (what == "gradients" || what == "all") append(gradient_checks());
  if (what == "oracle" || what == "all") append(oracle_checks());
  if (out.empty()) {
    throw std::invalid_argument("unknown check suite '" + what + "'");
  }
  return out;
}

nlohmann::json checks_json(const std::vector<CheckResult>& results) {
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    list.push_back({{"name", r.name},
                    {"passed", r.passed},
                    {"detail", r.detail},
                    {"seconds", r.seconds}});
  }
  return {{"passed", all}, {"checks", list}};
}

}  // namespace mfp
