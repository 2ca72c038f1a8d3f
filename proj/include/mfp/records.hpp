#pragma once

#include "mfp/flow.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfp {

/// Minimal CSV table: a header row and string cells. Numbers written by this
/// project use the shortest round-trip form, so read/write is lossless.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);

/// Columns: run_id, seed, step, epoch, loss, l2_rel_error, wall_ms.
CsvTable run_table(const RunRecord& record);

struct SummaryRow {
  long long step = 0;
  double mean_loss = 0.0;
  double std_loss = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;
};

/// Per-evaluation mean and sample standard deviation across runs.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs);
CsvTable summary_table(const std::vector<SummaryRow>& rows);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};
/// Sample statistics (n - 1 denominator; stddev 0 for a single value).
MeanStd mean_std(const std::vector<double>& values);

nlohmann::json config_json(const TrainConfig& config);
nlohmann::json run_header_json(const RunRecord& record);

}  // namespace mfp
