#pragma once

#include "mfp/activation.hpp"
#include "mfp/field.hpp"
#include "mfp/params.hpp"
#include "mfp/spectral.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfp {

/// How total_time converts into a step count.
enum class TimeConvention {
  learning_rate,  // total_time = learning_rate * steps
  mean_field,     // total_time = (learning_rate * m) * steps
};

struct TrainConfig {
  int dim = 1;
  int width = 100;
  double tau = 4.0;
  CosineSeries source{1};
  std::string source_label = "k=1";

  int batch_size = 100;
  int dataset_size = 100000;
  /// 0 selects 1 / (2 n m).
  double learning_rate = 0.0;
  double lr_mult = 1.0;
  double total_time = 2.0;
  TimeConvention time_convention = TimeConvention::learning_rate;
  /// Nonzero overrides the step count derived from total_time.
  long long steps = 0;

  std::uint64_t seed = 0;
  int repeats = 4;
  int eval_samples = 100000;
  /// 0 selects ~10 evaluations per run.
  long long eval_every = 0;

  bool constrained = true;
  bool full_batch = false;
  /// With full_batch and d <= 3, a positive level trains on the tensor
  /// Gauss-Legendre set instead of the whole dataset.
  int quadrature_level = 0;
  Normalization normalization = Normalization::mean;
  bool record_wall_time = true;
  int table_resolution = 4096;

  double effective_learning_rate() const;
  /// Step applied to the velocity: learning_rate / scale, i.e. zeta * m for
  /// 1/m normalization.
  double velocity_step() const;
  long long total_steps() const;
  long long steps_per_epoch() const;
  long long effective_eval_every() const;
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

struct EvalRow {
  long long step = 0;
  long long epoch = 0;
  double loss = 0.0;
  double l2_rel_error = 0.0;
  double wall_ms = 0.0;
};

struct RunRecord {
  TrainConfig config;
  int run_id = 0;
  std::uint64_t seed = 0;  // derived per-run seed
  std::uint64_t dataset_seed = 0;
  std::uint64_t init_seed = 0;
  std::uint64_t eval_seed = 0;
  std::vector<EvalRow> rows;
  Cloud final_cloud{1, 1, 4.0};

  double final_error() const { return rows.back().l2_rel_error; }
};

/// Non-finite loss or parameters during training.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long long step, double loss, const std::string& what)
      : std::runtime_error(what), step_(step), loss_(loss) {}
  long long step() const { return step_; }
  double loss() const { return loss_; }

 private:
  long long step_;
  double loss_;
};

/// N i.i.d. uniform points of [0,1]^d as columns.
Eigen::MatrixXd generate_dataset(int dim, int count, std::uint64_t seed);

/// One explicit step from the current cloud. The velocity is computed once
/// from the pre-step cloud and all particles move simultaneously by
/// `velocity_step` times the (tangent, if constrained) velocity. Returns the
/// report that was applied.
VelocityReport sgd_step(Cloud& cloud, const SampleBatch& batch,
                        const CosineSeries& f, const MollifiedActivation& act,
                        double velocity_step, bool constrained);

/// ||u - u*||_{L2} / ||u*||_{L2} with a Monte-Carlo numerator on `samples`
/// points from `seed` and the exact series norm in the denominator.
double eval_l2_error(const Cloud& cloud, const CosineSeries& u_star,
                     int samples, std::uint64_t seed);
double eval_l2_error(const Cloud& cloud, const CosineSeries& u_star,
                     int samples, std::uint64_t seed,
                     const MollifiedActivation& act);

/// Seed of repeat `run_id` derived from the master seed.
std::uint64_t run_seed(std::uint64_t master, int run_id);

/// A full training run. Throws DivergenceError on blow-up.
RunRecord train(const TrainConfig& config, int run_id = 0);

/// Outcome of `config.repeats` runs; repeats execute on up to `threads`
/// worker threads. Records stay ordered by run id.
struct RepeatOutcome {
  std::vector<RunRecord> runs;
  std::optional<DivergenceError> divergence;
  int diverged_run = -1;
};
RepeatOutcome train_repeats(const TrainConfig& config, int threads = 1);

/// Threads requested through MFP_THREADS (default 1).
int thread_count_from_env();

}  // namespace mfp
