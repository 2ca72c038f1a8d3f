#include <doctest.h>

#include "mfp/flow.hpp"
#include "mfp/oracle.hpp"
#include "mfp/records.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

using namespace mfp;

namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.dim = 1;
  c.width = 20;
  c.source = make_source({1});
  c.batch_size = 10;
  c.dataset_size = 200;
  c.steps = 300;
  c.repeats = 2;
  c.eval_samples = 500;
  c.eval_every = 100;
  c.record_wall_time = false;
  return c;
}

}  // namespace

TEST_CASE("step conventions") {
  TrainConfig c;
  c.width = 100;
  c.batch_size = 100;
  CHECK(c.effective_learning_rate() == doctest::Approx(5e-5));
  CHECK(c.velocity_step() == doctest::Approx(5e-3));
  CHECK(c.total_steps() == 40000);
  CHECK(c.steps_per_epoch() == 1000);
  CHECK(c.effective_eval_every() == 4000);

  c.time_convention = TimeConvention::mean_field;
  CHECK(c.total_steps() == 400);

  c.time_convention = TimeConvention::learning_rate;
  c.normalization = Normalization::sum;
  CHECK(c.velocity_step() == doctest::Approx(5e-5));
  c.lr_mult = 100;
  CHECK(c.effective_learning_rate() == doctest::Approx(5e-3));
  CHECK(c.total_steps() == 400);
  c.steps = 7;
  CHECK(c.total_steps() == 7);
  c.learning_rate = 0.01;
  CHECK(c.effective_learning_rate() == doctest::Approx(1.0));
}

TEST_CASE("configuration validation") {
  TrainConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  auto broken = [&](auto mutate) {
    TrainConfig b = small_config();
    mutate(b);
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  };
  broken([](TrainConfig& b) { b.width = 0; });
  broken([](TrainConfig& b) { b.tau = -1; });
  broken([](TrainConfig& b) { b.dim = 2; });
  broken([](TrainConfig& b) { b.source = CosineSeries(1).add({0}, 1.0); });
  broken([](TrainConfig& b) { b.source = CosineSeries(1); });
  broken([](TrainConfig& b) { b.batch_size = 500; });
  broken([](TrainConfig& b) { b.lr_mult = 0; });
  broken([](TrainConfig& b) { b.repeats = 0; });
  broken([](TrainConfig& b) {
    b.dim = 4;
    b.source = make_source({1, 0, 0, 0});
    b.full_batch = true;
    b.quadrature_level = 8;
  });
}

TEST_CASE("dataset is uniform on the cube and seeded") {
  const Eigen::MatrixXd a = generate_dataset(3, 20000, 9);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() < 1.0);
  CHECK(std::abs(a.mean() - 0.5) < 0.01);
  CHECK(generate_dataset(3, 50, 9) == a.leftCols(50));
  CHECK(generate_dataset(3, 50, 10) != a.leftCols(50));
}

TEST_CASE("sgd step updates all particles from the pre-step velocity") {
  const MollifiedActivation act(4.0);
  Cloud cloud = init_cloud(7, 2, 12);
  cloud.a.setConstant(0.5);
  const Cloud before = cloud;
  const SampleBatch batch{generate_dataset(2, 30, 4), {}};
  const CosineSeries f = make_source({1, 1});
  const VelocityReport pre = empirical_velocity(before, batch, f, act);

  const VelocityReport applied = sgd_step(cloud, batch, f, act, 0.05, true);
  CHECK(applied.ambient == pre.ambient);
  for (int j = 0; j < 7; ++j) {
    const Point expect = retract(before.particle(j),
                                 Eigen::VectorXd(-pre.tangent.col(j)), 0.05);
    CHECK((cloud.particle(j).packed() - expect.packed()).norm() == 0.0);
  }
  CHECK(on_manifold(cloud));

  Cloud ambient = before;
  sgd_step(ambient, batch, f, act, 0.05, false);
  for (int j = 0; j < 7; ++j) {
    const Eigen::VectorXd expect =
        before.particle(j).packed() - 0.05 * pre.ambient.col(j);
    CHECK((ambient.particle(j).packed() - expect).norm() < 1e-15);
  }
}

TEST_CASE("a small step decreases the full-batch energy") {
  const MollifiedActivation act(4.0);
  Cloud cloud = init_cloud(30, 1, 2);
  const SampleBatch quad = quadrature_batch(1, 64);
  const CosineSeries f = make_source({1});
  double prev = empirical_loss(cloud, quad, f, act);
  for (int s = 0; s < 50; ++s) {
    sgd_step(cloud, quad, f, act, 1.0 / 128, true);
    const double now = empirical_loss(cloud, quad, f, act);
    CHECK(now <= prev + 1e-12);
    prev = now;
  }
  CHECK(prev < 0.0);
}

TEST_CASE("training is deterministic and records every evaluation") {
  const TrainConfig c = small_config();
  const RunRecord a = train(c, 0);
  const RunRecord b = train(c, 0);
  REQUIRE(a.rows.size() == 4);
  CHECK(a.rows.front().step == 0);
  CHECK(a.rows.back().step == 300);
  CHECK(a.rows[1].epoch == 4);
  std::ostringstream sa, sb;
  write_csv(sa, run_table(a));
  write_csv(sb, run_table(b));
  CHECK(sa.str() == sb.str());
  CHECK(a.final_cloud.w == b.final_cloud.w);
  CHECK(a.rows.back().l2_rel_error < a.rows.front().l2_rel_error);
  CHECK(on_manifold(a.final_cloud));

  const RunRecord other = train(c, 1);
  CHECK(other.seed != a.seed);
  CHECK(other.dataset_seed != a.dataset_seed);
  CHECK(other.final_error() != a.final_error());
}

TEST_CASE("repeats are independent of the thread count") {
  const TrainConfig c = small_config();
  const RepeatOutcome serial = train_repeats(c, 1);
  const RepeatOutcome threaded = train_repeats(c, 2);
  REQUIRE(serial.runs.size() == 2);
  REQUIRE(threaded.runs.size() == 2);
  for (int r = 0; r < 2; ++r) {
    CHECK(serial.runs[r].run_id == r);
    CHECK(serial.runs[r].final_error() == threaded.runs[r].final_error());
  }
  CHECK_FALSE(serial.divergence);
}

TEST_CASE("an oversized step is reported as divergence") {
  TrainConfig c = small_config();
  c.width = 100;
  c.batch_size = 100;
  c.dataset_size = 1000;
  c.steps = 2000;
  c.lr_mult = 5000;
  c.repeats = 1;
  CHECK_THROWS_AS(train(c, 0), DivergenceError);
  const RepeatOutcome out = train_repeats(c, 1);
  CHECK(out.divergence.has_value());
  CHECK(out.diverged_run == 0);
  CHECK(out.runs.empty());
}

TEST_CASE("evaluation error of the exact interpolant is small") {
  const CosineSeries u = exact_solution(make_source({1}));
  const Cloud cloud = hat_interpolant_1d(u, 64, 256.0);
  CHECK(eval_l2_error(cloud, u, 4000, 3) < 2e-3);
  const Cloud zero = init_cloud(10, 1, 1);
  CHECK(eval_l2_error(zero, u, 4000, 3) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("seed derivation") {
  CHECK(run_seed(0, 0) != run_seed(0, 1));
  CHECK(run_seed(1, 0) != run_seed(0, 0));
  CHECK(run_seed(5, 3) == run_seed(5, 3));
}
