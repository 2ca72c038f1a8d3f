// Command-line front end: train, sweep, check, dump-solution.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical
// divergence.

#include "mfp/checks.hpp"
#include "mfp/config.hpp"
#include "mfp/field.hpp"
#include "mfp/flow.hpp"
#include "mfp/records.hpp"
#include "mfp/text.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace mfp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;

struct TrainArgs {
  std::string config_path;
  std::string preset_name;
  std::vector<std::string> sets;
  std::optional<int> width;
  std::optional<int> dim;
  std::optional<double> lr_mult;
  std::optional<int> repeats;
  std::optional<long long> seed;
  std::optional<long long> steps;
  std::optional<std::string> source;
  std::optional<std::string> out;
  bool no_timing = false;
};

void add_common_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--config", a.config_path, "key=value configuration file");
  cmd->add_option("--set", a.sets, "override: key=value (repeatable)");
  cmd->add_option("--width", a.width, "network width m");
  cmd->add_option("--dim", a.dim, "dimension d");
  cmd->add_option("--lr-mult", a.lr_mult, "multiplier on the learning rate");
  cmd->add_option("--repeats", a.repeats, "independent runs");
  cmd->add_option("--seed", a.seed, "master seed");
  cmd->add_option("--steps", a.steps, "explicit step count");
  cmd->add_option("--source", a.source,
                  "source: 'mode K1,K2,..', 'mixed' or 'series PATH'");
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_flag("--no-timing", a.no_timing,
                "write wall_ms = 0 for byte-reproducible CSVs");
}

ExperimentConfig build_config(const TrainArgs& a) {
  ExperimentConfig cfg =
      a.preset_name.empty() ? ExperimentConfig{} : preset(a.preset_name);
  if (!a.config_path.empty()) apply_settings(cfg, read_key_values(a.config_path));
  KeyValues kv;
  for (const auto& s : a.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value");
    kv[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
  }
  apply_settings(cfg, kv);
  if (a.width) cfg.train.width = *a.width;
  if (a.dim) cfg.train.dim = *a.dim;
  if (a.lr_mult) cfg.train.lr_mult = *a.lr_mult;
  if (a.repeats) cfg.train.repeats = *a.repeats;
  if (a.seed) cfg.train.seed = static_cast<std::uint64_t>(*a.seed);
  if (a.steps) cfg.train.steps = *a.steps;
  if (a.source) cfg.source = *a.source;
  if (a.out) cfg.output_dir = *a.out;
  if (a.no_timing) cfg.train.record_wall_time = false;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_table(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, table);
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

void write_divergence(const fs::path& dir, int run, const DivergenceError& e) {
  nlohmann::json j = {{"run_id", run},
                      {"step", e.step()},
                      {"loss", std::isfinite(e.loss()) ? nlohmann::json(e.loss())
                                                       : nlohmann::json(nullptr)},
                      {"message", e.what()}};
  write_text(dir / "divergence.json", j.dump(2) + "\n");
  std::cerr << "divergence in run " << run << ": " << e.what() << "\n";
}

int cmd_train(const TrainArgs& args) {
  ExperimentConfig cfg = build_config(args);
  cfg.finalize();
  cfg.train.validate();
  const fs::path dir = cfg.output_dir;
  prepare_dir(dir);
  write_text(dir / "config.json", config_json(cfg.train).dump(2) + "\n");
  {
    std::ofstream series(dir / "u_star.series");
    write_series(series, exact_solution(cfg.train.source));
  }

  std::cerr << "training " << cfg.train.repeats << " run(s): d="
            << cfg.train.dim << " m=" << cfg.train.width
            << " steps=" << cfg.train.total_steps() << "\n";
  const RepeatOutcome outcome =
      train_repeats(cfg.train, thread_count_from_env());
  for (const auto& run : outcome.runs) {
    const std::string id = std::to_string(run.run_id);
    write_table(dir / ("run_" + id + ".csv"), run_table(run));
    write_text(dir / ("run_" + id + ".json"), run_header_json(run).dump(2) + "\n");
    save_snapshot((dir / ("cloud_" + id + ".snap")).string(), run.final_cloud);
  }
  if (outcome.divergence) {
    write_divergence(dir, outcome.diverged_run, *outcome.divergence);
    return kExitDiverged;
  }
  write_table(dir / "summary.csv", summary_table(summarize(outcome.runs)));
  const auto& last = summarize(outcome.runs).back();
  std::cout << "final relative L2 error: " << last.mean_error << " +- "
            << last.std_error << "\n";
  return kExitOk;
}

int cmd_sweep(const TrainArgs& args) {
  ExperimentConfig base = build_config(args);
  if (base.sweep_dims.empty() || base.sweep_kbars.empty() ||
      base.sweep_widths.empty()) {
    throw ConfigError("sweep needs sweep.dims, sweep.kbars and sweep.widths");
  }
  const fs::path dir = base.output_dir;
  prepare_dir(dir);
  CsvTable table;
  table.header = {"dim", "kbar", "width", "mean_error", "std_error"};
  bool diverged = false;
  for (int d : base.sweep_dims) {
    for (int kbar : base.sweep_kbars) {
      for (int m : base.sweep_widths) {
        ExperimentConfig cell = base;
        cell.train.dim = d;
        cell.train.width = m;
        cell.source = "mode " + std::to_string(kbar);
        cell.finalize();
        std::cerr << "cell d=" << d << " kbar=" << kbar << " m=" << m << "\n";
        const RepeatOutcome out =
            train_repeats(cell.train, thread_count_from_env());
        MeanStd stats{NAN, NAN};
        if (out.divergence) {
          diverged = true;
          std::cerr << "  diverged: " << out.divergence->what() << "\n";
        } else {
          std::vector<double> finals;
          for (const auto& r : out.runs) finals.push_back(r.final_error());
          stats = mean_std(finals);
        }
        table.rows.push_back({std::to_string(d), std::to_string(kbar),
                              std::to_string(m), format_double(stats.mean),
                              format_double(stats.stddev)});
      }
    }
  }
  write_table(dir / "sweep.csv", table);
  return diverged ? kExitDiverged : kExitOk;
}

int cmd_check(const std::string& what) {
  const auto results = run_checks(what);
  const auto verdict = checks_json(results);
  std::cout << verdict.dump(2) << "\n";
  return verdict["passed"].get<bool>() ? kExitOk : kExitConfig;
}

struct DumpArgs {
  std::string snapshot;
  std::string mode;
  int resolution = 200;
  std::string exact;
  std::string out;
};

int cmd_dump(const DumpArgs& a) {
  if (a.resolution < 2) throw ConfigError("resolution must be >= 2");
  const Cloud cloud = load_snapshot(a.snapshot);
  const int d = cloud.dim();
  const std::string mode = a.mode.empty() ? (d == 1 ? "line" : "slice") : a.mode;
  if (mode != "line" && mode != "slice") {
    throw ConfigError("mode must be line or slice");
  }
  if (mode == "slice" && d < 2) throw ConfigError("slice mode needs d >= 2");
  std::optional<CosineSeries> exact;
  if (!a.exact.empty()) {
    std::ifstream in(a.exact);
    if (!in) throw ConfigError("cannot read " + a.exact);
    exact = read_series(in, d);
  }

  const int res = a.resolution;
  const int count = mode == "line" ? res : res * res;
  Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(d, count, 0.5);
  for (int i = 0; i < count; ++i) {
    if (mode == "line") {
      pts(0, i) = static_cast<double>(i) / (res - 1);
    } else {
      pts(0, i) = static_cast<double>(i % res) / (res - 1);
      pts(1, i) = static_cast<double>(i / res) / (res - 1);
    }
  }
  const NetworkFields fields =
      evaluate_network(cloud, pts, MollifiedActivation(cloud.tau));

  CsvTable table;
  table.header = mode == "line" ? std::vector<std::string>{"x", "u"}
                                : std::vector<std::string>{"x1", "x2", "u"};
  if (exact) table.header.push_back("u_star");
  for (int i = 0; i < count; ++i) {
    std::vector<std::string> row = {format_double(pts(0, i))};
    if (mode == "slice") row.push_back(format_double(pts(1, i)));
    row.push_back(format_double(fields.value[i]));
    if (exact) row.push_back(format_double((*exact)(pts.col(i))));
    table.rows.push_back(std::move(row));
  }
  if (a.out.empty()) {
    write_csv(std::cout, table);
  } else {
    write_table(a.out, table);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field particle solver for the Neumann Poisson problem"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "run repeated trainings");
  add_common_options(train, train_args);
  std::string preset_help = "preset:";
  for (const auto& p : preset_names()) preset_help += " " + p;
  train->add_option("--preset", train_args.preset_name, preset_help);

  TrainArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "grid of runs over dim x kbar x width");
  add_common_options(sweep, sweep_args);
  sweep->add_option("--preset", sweep_args.preset_name, preset_help);

  std::string check_what = "all";
  auto* check = app.add_subcommand("check", "run the verification suites");
  check->add_option("suite", check_what, "activation | gradients | oracle | all")
      ->check(CLI::IsMember({"activation", "gradients", "oracle", "all"}));

  DumpArgs dump_args;
  auto* dump = app.add_subcommand("dump-solution", "tabulate a trained network");
  dump->add_option("snapshot", dump_args.snapshot, "cloud snapshot file")
      ->required();
  dump->add_option("--mode", dump_args.mode, "line | slice");
  dump->add_option("--resolution", dump_args.resolution, "points per axis");
  dump->add_option("--exact", dump_args.exact, "exact-solution series file");
  dump->add_option("--out", dump_args.out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return cmd_train(train_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*check) return cmd_check(check_what);
    if (*dump) return cmd_dump(dump_args);
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
