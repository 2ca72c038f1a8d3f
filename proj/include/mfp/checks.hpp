#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mfp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the property suite `what` (activation, gradients, oracle or all).
/// Throws std::invalid_argument for an unknown suite name.
std::vector<CheckResult> run_checks(const std::string& what);

nlohmann::json checks_json(const std::vector<CheckResult>& results);

}  // namespace mfp
