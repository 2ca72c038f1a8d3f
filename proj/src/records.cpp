#include "mfp/records.hpp"

#include "mfp/text.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mfp {

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const std::size_t idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(parse_double(row.at(idx)));
  return out;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (first) {
      table.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw std::runtime_error("CSV row has " + std::to_string(cells.size()) +
                               " cells, header has " +
                               std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (first) throw std::runtime_error("CSV is empty");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto write_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
}

CsvTable run_table(const RunRecord& record) {
  CsvTable t;
  t.header = {"run_id", "seed", "step", "epoch", "loss", "l2_rel_error",
              "wall_ms"};
  for (const auto& r : record.rows) {
    t.rows.push_back({std::to_string(record.run_id),
                      std::to_string(record.seed), std::to_string(r.step),
                      std::to_string(r.epoch), format_double(r.loss),
                      format_double(r.l2_rel_error), format_double(r.wall_ms)});
  }
  return t;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (values.size() - 1))};
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs) {
  std::vector<SummaryRow> out;
  if (runs.empty()) return out;
  std::size_t rows = runs.front().rows.size();
  for (const auto& r : runs) rows = std::min(rows, r.rows.size());
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> losses, errors;
    for (const auto& r : runs) {
      losses.push_back(r.rows[i].loss);
      errors.push_back(r.rows[i].l2_rel_error);
    }
    const MeanStd l = mean_std(losses);
    const MeanStd e = mean_std(errors);
    out.push_back({runs.front().rows[i].step, l.mean, l.stddev, e.mean,
                   e.stddev});
  }
  return out;
}

CsvTable summary_table(const std::vector<SummaryRow>& rows) {
  CsvTable t;
  t.header = {"step", "mean_loss", "std_loss", "mean_error", "std_error"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.step), format_double(r.mean_loss),
                      format_double(r.std_loss), format_double(r.mean_error),
                      format_double(r.std_error)});
  }
  return t;
}

nlohmann::json config_json(const TrainConfig& c) {
  std::ostringstream series;
  write_series(series, c.source);
  return {
      {"dim", c.dim},
      {"width", c.width},
      {"tau", c.tau},
      {"source", c.source_label},
      {"source_series", series.str()},
      {"batch_size", c.batch_size},
      {"dataset_size", c.dataset_size},
      {"learning_rate", c.effective_learning_rate()},
      {"lr_mult", c.lr_mult},
      {"velocity_step", c.velocity_step()},
      {"total_time", c.total_time},
      {"time_convention", c.time_convention == TimeConvention::learning_rate
                              ? "learning_rate"
                              : "mean_field"},
      {"steps", c.total_steps()},
      {"seed", c.seed},
      {"repeats", c.repeats},
      {"eval_samples", c.eval_samples},
      {"eval_every", c.effective_eval_every()},
      {"constrained", c.constrained},
      {"full_batch", c.full_batch},
      {"quadrature_level", c.quadrature_level},
      {"normalization",
       c.normalization == Normalization::mean ? "mean" : "sum"},
      {"table_resolution", c.table_resolution},
  };
}

nlohmann::json run_header_json(const RunRecord& record) {
  return {{"run_id", record.run_id},
          {"config", config_json(record.config)},
          {"rng",
           {{"master_seed", record.config.seed},
            {"run_seed", record.seed},
            {"dataset_seed", record.dataset_seed},
            {"init_seed", record.init_seed},
            {"eval_seed", record.eval_seed},
            {"shuffle_stream", "shuffle/<epoch>"}}}};
}

}  // namespace mfp
