#include <doctest.h>

#include "mfp/activation.hpp"
#include "mfp/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace mfp;

// Reference values below were computed with mpmath at 30 digits.

TEST_CASE("mollifier constants") {
  CHECK(mollifier_normalization() ==
        doctest::Approx(0.95573680146556869995).epsilon(1e-13));
  CHECK(mollifier(0.0, 4.0) == doctest::Approx(3.8229472058622748).epsilon(1e-13));
  CHECK(mollifier(0.25, 4.0) == 0.0);
  CHECK(mollifier(-0.3, 4.0) == 0.0);
  CHECK(mollifier(0.1, 4.0) == doctest::Approx(mollifier(-0.1, 4.0)));
}

TEST_CASE("mollifier has unit mass for several tau") {
  for (double tau : {1.0, 4.0, 37.0}) {
    const double mass = integrate_adaptive(
        [tau](double y) { return mollifier(y, tau); }, -1.0 / tau, 1.0 / tau,
        1e-13);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("sigma_tau equals relu outside the window, exactly") {
  const double tau = 4.0;
  for (int i = 0; i <= 200; ++i) {
    const double y = -3.0 + 6.0 * i / 200.0;
    if (std::abs(y) < 1.0 / tau) continue;
    CHECK(sigma_tau(y, tau) == relu(y));
  }
  CHECK(sigma_tau(1.0 / tau, tau) == 1.0 / tau);
  CHECK(sigma_tau(-1.0 / tau, tau) == 0.0);
}

TEST_CASE("sigma_tau reference values and scaling") {
  CHECK(sigma_tau(0.0, 1.0) ==
        doctest::Approx(0.14458024971666246344).epsilon(1e-12));
  CHECK(sigma_tau(0.0, 8.0) == doctest::Approx(0.14458024971666246344 / 8.0));
  // sigma_tau(y) = sigma_1(tau y) / tau
  CHECK(sigma_tau(0.05, 4.0) == doctest::Approx(sigma_tau(0.2, 1.0) / 4.0));
  CHECK(hat_tau(0.0, 4.0, 0) ==
        doctest::Approx(0.96385493757083438414).epsilon(1e-12));
}

TEST_CASE("sigma_tau is a convex majorant of relu within sigma_1(0)/tau") {
  const double tau = 4.0;
  const double gap = sigma_tau(0.0, tau);
  double prev_slope = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double y = -0.3 + 0.6 * i / 100.0;
    const double s = sigma_tau(y, tau);
    CHECK(s >= relu(y) - 1e-15);
    CHECK(s - relu(y) <= gap + 1e-15);
    const double slope = sigma_tau_deriv(y, tau, 1);
    CHECK(slope >= prev_slope - 1e-12);
    CHECK(slope >= 0.0);
    CHECK(slope <= 1.0 + 1e-12);
    prev_slope = slope;
  }
}

TEST_CASE("sigma_tau_deriv rejects unknown orders") {
  CHECK_THROWS_AS(sigma_tau_deriv(0.0, 4.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(sigma_tau_deriv(0.0, 4.0, 3), std::invalid_argument);
}

TEST_CASE("plain hat") {
  CHECK(hat(0.0) == 1.0);
  CHECK(hat(0.5) == 0.5);
  CHECK(hat(-0.5) == 0.5);
  CHECK(hat(1.0) == 0.0);
  CHECK(hat(-1.7) == 0.0);
  CHECK(hat(2.5) == 0.0);
  CHECK(hat_slope(0.5) == -1.0);
  CHECK(hat_slope(-0.5) == 1.0);
  CHECK(hat_slope(1.5) == 0.0);
}

TEST_CASE("regularized hat vanishes identically outside its support") {
  const double tau = 4.0;
  for (double y : {1.25, 1.3, 2.0, 10.0, -1.25, -5.0}) {
    for (int order = 0; order <= 2; ++order) CHECK(hat_tau(y, tau, order) == 0.0);
  }
  const MollifiedActivation act(tau);
  CHECK(act.support_radius() == 1.25);
  for (double y : {1.25, 3.0, -1.25, -2.0}) {
    const HatJet j = act.hat_jet(y);
    CHECK(j.value == 0.0);
    CHECK(j.slope == 0.0);
    CHECK(j.curvature == 0.0);
  }
}

TEST_CASE("regularized hat is even with an odd slope") {
  const MollifiedActivation act(4.0);
  for (double y : {0.1, 0.3, 0.77, 1.1}) {
    CHECK(act.hat(y) == doctest::Approx(act.hat(-y)).epsilon(1e-12));
    CHECK(act.hat(y, 1) == doctest::Approx(-act.hat(-y, 1)).epsilon(1e-10));
    CHECK(act.hat(y, 2) == doctest::Approx(act.hat(-y, 2)).epsilon(1e-9));
  }
}

TEST_CASE("table agrees with direct quadrature") {
  const double tau = 4.0;
  const MollifiedActivation act(tau);
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double y = -1.4 + 2.8 * i / 400.0;
    for (int order = 0; order <= 2; ++order) {
      worst = std::max(worst, std::abs(act.hat(y, order) - hat_tau(y, tau, order)));
    }
  }
  CHECK(worst < 1e-8);
  CHECK(act.sigma(0.0) == doctest::Approx(sigma_tau(0.0, tau)).epsilon(1e-12));
  CHECK(act.sigma_d2(0.0) == doctest::Approx(mollifier(0.0, tau)).epsilon(1e-10));
}

TEST_CASE("table derivatives are consistent with finite differences") {
  const MollifiedActivation act(4.0);
  const double h = 1e-5;
  for (double y : {-1.1, -0.6, -0.02, 0.13, 0.9}) {
    const double d1 = (act.hat(y + h) - act.hat(y - h)) / (2 * h);
    const double d2 = (act.hat(y + h, 1) - act.hat(y - h, 1)) / (2 * h);
    CHECK(act.hat(y, 1) == doctest::Approx(d1).epsilon(1e-6));
    CHECK(act.hat(y, 2) == doctest::Approx(d2).epsilon(1e-5));
  }
}

TEST_CASE("infinite tau selects the plain hat") {
  const MollifiedActivation act(std::numeric_limits<double>::infinity());
  CHECK_FALSE(act.regularized());
  for (double y : {-1.5, -0.5, 0.0, 0.25, 0.75, 1.0, 3.0}) {
    CHECK(act.hat(y) == hat(y));
  }
  CHECK(act.hat(0.3, 2) == 0.0);
}

TEST_CASE("H1 distance matches reference values") {
  struct Ref {
    double tau;
    double value;
  };
  const Ref refs[] = {{4.0, 0.302704911063598},
                      {16.0, 0.151201748358255},
                      {64.0, 0.0755961620860083},
                      {256.0, 0.037797933785218}};
  for (const auto& r : refs) {
    CHECK(h1_distance_hat(r.tau, 64) == doctest::Approx(r.value).epsilon(1e-10));
  }
  CHECK(h1_distance_hat(std::numeric_limits<double>::infinity(), 64) == 0.0);
  CHECK_THROWS_AS(h1_distance_hat(4.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(h1_distance_hat(0.5, 64), std::invalid_argument);
}

TEST_CASE("H1 distance decays like tau^(-1/2)") {
  const double lo = h1_distance_hat(4.0, 64);
  const double hi = h1_distance_hat(256.0, 64);
  const double slope = std::log(hi / lo) / std::log(256.0 / 4.0);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.01));
}
