#pragma once

#include "mfp/flow.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training setup plus CLI-level settings (output location, sweep axes).
///
/// `source` is resolved against `train.dim` by finalize():
///   mode K1,K2,...   cosine mode (padded with zeros up to dim)
///   mixed            the nearest-neighbour mixed-mode source
///   series PATH      a series file (`k_1 .. k_d coefficient` per line)
struct ExperimentConfig {
  TrainConfig train;
  std::string source = "mode 1";
  std::string output_dir = "out";
  std::vector<int> sweep_dims;
  std::vector<int> sweep_kbars;
  std::vector<int> sweep_widths;

  /// Builds train.source from `source`; throws ConfigError.
  void finalize();
};

using KeyValues = std::map<std::string, std::string>;

/// Flat `key = value` lines; '#' starts a comment.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::string& path);

/// Applies known keys; unknown keys or malformed values throw ConfigError.
void apply_settings(ExperimentConfig& config, const KeyValues& values);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ExperimentConfig preset(const std::string& name);

CosineSeries resolve_source(const std::string& spec, int dim);

}  // namespace mfp
