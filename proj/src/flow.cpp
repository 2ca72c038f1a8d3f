#include "mfp/flow.hpp"

#include "mfp/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace mfp {

double TrainConfig::effective_learning_rate() const {
  const double base = learning_rate > 0.0
                          ? learning_rate
                          : 1.0 / (2.0 * batch_size * static_cast<double>(width));
  return base * lr_mult;
}

double TrainConfig::velocity_step() const {
  const double lr = effective_learning_rate();
  return normalization == Normalization::mean ? lr * width : lr;
}

long long TrainConfig::total_steps() const {
  if (steps > 0) return steps;
  const double per_step = time_convention == TimeConvention::learning_rate
                              ? effective_learning_rate()
                              : velocity_step();
  return std::max(1LL, std::llround(total_time / per_step));
}

long long TrainConfig::steps_per_epoch() const {
  return std::max(1, dataset_size / batch_size);
}

long long TrainConfig::effective_eval_every() const {
  if (eval_every > 0) return eval_every;
  return std::max(1LL, total_steps() / 10);
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("invalid config: " + msg);
  };
  if (dim < 1) fail("dim must be >= 1");
  if (width < 1) fail("width must be >= 1");
  if (!(tau > 0.0)) fail("tau must be positive");
  if (source.dim() != dim) fail("source dimension differs from dim");
  if (!source.mean_zero()) fail("source must have zero mean (no k = 0 term)");
  if (source.empty()) fail("source is identically zero");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (dataset_size < 1) fail("dataset_size must be >= 1");
  if (batch_size > dataset_size) fail("batch_size exceeds dataset_size");
  if (!(effective_learning_rate() > 0.0)) fail("learning rate must be > 0");
  if (!(total_time > 0.0) && steps <= 0) fail("total_time must be > 0");
  if (repeats < 1) fail("repeats must be >= 1");
  if (eval_samples < 1) fail("eval_samples must be >= 1");
  if (full_batch && quadrature_level > 0 && dim > 3) {
    fail("quadrature full batch requires d <= 3");
  }
  if (table_resolution < 16) fail("table_resolution must be >= 16");
}

Eigen::MatrixXd generate_dataset(int dim, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("generate_dataset: N < 1");
  Engine rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd pts(dim, count);
  for (int i = 0; i < count; ++i) {
    for (int k = 0; k < dim; ++k) pts(k, i) = unif(rng);
  }
  return pts;
}

VelocityReport sgd_step(Cloud& cloud, const SampleBatch& batch,
                        const CosineSeries& f, const MollifiedActivation& act,
                        double velocity_step, bool constrained) {
  VelocityReport report = empirical_velocity(cloud, batch, f, act);
  if (constrained) {
    for (int j = 0; j < cloud.size(); ++j) {
      const Eigen::VectorXd delta = -report.tangent.col(j);
      cloud.set_particle(j, retract(cloud.particle(j), delta, velocity_step));
    }
  } else {
    const int d = cloud.dim();
    cloud.c -= velocity_step * report.ambient.row(0).transpose();
    cloud.a -= velocity_step * report.ambient.row(1).transpose();
    cloud.w -= velocity_step * report.ambient.middleRows(2, d);
    cloud.b -= velocity_step * report.ambient.row(d + 2).transpose();
  }
  return report;
}

namespace {

struct EvalSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd u_star;
  double u_star_norm;
};

EvalSet make_eval_set(int dim, const CosineSeries& u_star, int samples,
                      std::uint64_t seed) {
  if (u_star.dim() != dim) {
    throw std::invalid_argument("eval: exact solution dimension mismatch");
  }
  const double norm = series_l2_norm(u_star);
  if (!(norm > 0.0)) {
    throw std::invalid_argument("eval: exact solution is identically zero");
  }
  EvalSet set{generate_dataset(dim, samples, seed), Eigen::VectorXd(samples),
              norm};
  for (int i = 0; i < samples; ++i) set.u_star[i] = u_star(set.points.col(i));
  return set;
}

struct Evaluation {
  double loss;
  double error;
};

Evaluation evaluate(const Cloud& cloud, const EvalSet& set,
                    const Eigen::VectorXd& fvals,
                    const MollifiedActivation& act) {
  const NetworkFields fields = evaluate_network(cloud, set.points, act);
  const double n = static_cast<double>(set.points.cols());
  const double mean_u = fields.value.mean();
  const double loss =
      (0.5 * fields.gradient.colwise().squaredNorm().transpose().array() -
       fvals.array() * fields.value.array())
              .sum() /
          n +
      0.5 * mean_u * mean_u;
  const double mse = (fields.value - set.u_star).squaredNorm() / n;
  return {loss, std::sqrt(mse) / set.u_star_norm};
}

}  // namespace

double eval_l2_error(const Cloud& cloud, const CosineSeries& u_star,
                     int samples, std::uint64_t seed,
                     const MollifiedActivation& act) {
  const EvalSet set = make_eval_set(cloud.dim(), u_star, samples, seed);
  const NetworkFields fields = evaluate_network(cloud, set.points, act);
  const double mse = (fields.value - set.u_star).squaredNorm() / samples;
  return std::sqrt(mse) / set.u_star_norm;
}

double eval_l2_error(const Cloud& cloud, const CosineSeries& u_star,
                     int samples, std::uint64_t seed) {
  return eval_l2_error(cloud, u_star, samples, seed,
                       MollifiedActivation(cloud.tau));
}

std::uint64_t run_seed(std::uint64_t master, int run_id) {
  return derive_seed(master, "run", static_cast<std::uint64_t>(run_id));
}

RunRecord train(const TrainConfig& config, int run_id) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  RunRecord record;
  record.config = config;
  record.run_id = run_id;
  record.seed = run_seed(config.seed, run_id);
  record.dataset_seed = derive_seed(record.seed, "dataset");
  record.init_seed = derive_seed(record.seed, "init");
  record.eval_seed = derive_seed(record.seed, "eval");

  const MollifiedActivation act(config.tau, config.table_resolution);
  const CosineSeries u_star = exact_solution(config.source);
  const int n = config.batch_size;
  const long long steps = config.total_steps();
  const long long per_epoch = config.steps_per_epoch();
  const long long eval_every = config.effective_eval_every();
  const double h = config.velocity_step();

  Cloud cloud = init_cloud(config.width, config.dim, record.init_seed,
                           config.tau);
  cloud.normalization = config.normalization;

  const EvalSet eval_set = make_eval_set(config.dim, u_star,
                                         config.eval_samples, record.eval_seed);
  Eigen::VectorXd eval_f(config.eval_samples);
  for (int i = 0; i < config.eval_samples; ++i) {
    eval_f[i] = config.source(eval_set.points.col(i));
  }

  auto add_row = [&](long long step, long long epoch) {
    const Evaluation e = evaluate(cloud, eval_set, eval_f, act);
    const double ms =
        config.record_wall_time
            ? std::chrono::duration<double, std::milli>(clock::now() - start)
                  .count()
            : 0.0;
    record.rows.push_back({step, epoch, e.loss, e.error, ms});
    if (!std::isfinite(e.loss)) {
      throw DivergenceError(step, e.loss,
                            "non-finite loss at evaluation of step " +
                                std::to_string(step));
    }
  };

  const Eigen::MatrixXd dataset =
      generate_dataset(config.dim, config.dataset_size, record.dataset_seed);
  std::vector<int> order(config.dataset_size);
  std::iota(order.begin(), order.end(), 0);

  SampleBatch batch;
  const bool fixed_batch = config.full_batch;
  if (fixed_batch) {
    batch = config.quadrature_level > 0
                ? quadrature_batch(config.dim, config.quadrature_level)
                : SampleBatch{dataset, {}};
  } else {
    batch.points.resize(config.dim, n);
  }

  add_row(0, 0);
  for (long long step = 0; step < steps; ++step) {
    const long long epoch = step / per_epoch;
    if (!fixed_batch) {
      const long long slot = step % per_epoch;
      if (slot == 0) {
        Engine shuffle_rng = make_engine(record.seed, "shuffle",
                                         static_cast<std::uint64_t>(epoch));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), shuffle_rng);
      }
      for (int i = 0; i < n; ++i) {
        batch.points.col(i) = dataset.col(order[slot * n + i]);
      }
    }

    VelocityReport report;
    try {
      report = sgd_step(cloud, batch, config.source, act, h,
                        config.constrained);
    } catch (const std::domain_error& e) {
      throw DivergenceError(step, NAN,
                            std::string("step ") + std::to_string(step) +
                                ": " + e.what());
    }
    if (!std::isfinite(report.loss_value) || !cloud.all_finite()) {
      std::ostringstream msg;
      msg << "divergence at step " << step << " (epoch " << epoch
          << "): batch loss " << report.loss_value
          << (cloud.all_finite() ? "" : ", non-finite parameters")
          << "; velocity step " << h << " violates the stability bound";
      throw DivergenceError(step, report.loss_value, msg.str());
    }
    const long long done = step + 1;
    if (done % eval_every == 0 || done == steps) {
      add_row(done, (done - 1) / per_epoch);
    }
  }

  record.final_cloud = std::move(cloud);
  return record;
}

RepeatOutcome train_repeats(const TrainConfig& config, int threads) {
  config.validate();
  const int repeats = config.repeats;
  std::vector<std::optional<RunRecord>> slots(repeats);
  std::vector<std::optional<DivergenceError>> failures(repeats);
  std::vector<std::exception_ptr> errors(repeats);

  auto run_one = [&](int r) {
    try {
      slots[r] = train(config, r);
    } catch (const DivergenceError& e) {
      failures[r] = e;
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  const int workers = std::clamp(threads, 1, repeats);
  if (workers == 1) {
    for (int r = 0; r < repeats; ++r) run_one(r);
  } else {
    std::mutex mu;
    int next = 0;
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        while (true) {
          int r;
          {
            std::lock_guard lock(mu);
            if (next >= repeats) return;
            r = next++;
          }
          run_one(r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  RepeatOutcome out;
  for (int r = 0; r < repeats; ++r) {
    if (errors[r]) std::rethrow_exception(errors[r]);
    if (failures[r] && !out.divergence) {
      out.divergence = failures[r];
      out.diverged_run = r;
    }
    if (slots[r]) out.runs.push_back(std::move(*slots[r]));
  }
  return out;
}

int thread_count_from_env() {
  const char* env = std::getenv("MFP_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

}  // namespace mfp
