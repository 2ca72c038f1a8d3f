#include <doctest.h>

#include "mfp/config.hpp"

#include <numbers>
#include <sstream>

using namespace mfp;

TEST_CASE("key value parsing") {
  std::istringstream in(
      "# experiment\n"
      "width = 250   # particles\n"
      "\n"
      "source=mode 3,1\n");
  const KeyValues kv = parse_key_values(in);
  CHECK(kv.size() == 2);
  CHECK(kv.at("width") == "250");
  CHECK(kv.at("source") == "mode 3,1");

  std::istringstream bad("width 250\n");
  CHECK_THROWS_AS(parse_key_values(bad), ConfigError);
  CHECK_THROWS_AS(read_key_values("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("settings are applied and validated") {
  ExperimentConfig c;
  apply_settings(c, {{"dim", "2"},
                     {"width", "50"},
                     {"source", "mode 3,1"},
                     {"normalization", "sum"},
                     {"time_convention", "mean_field"},
                     {"constrained", "false"},
                     {"sweep.dims", "1, 2,4"},
                     {"seed", "99"}});
  CHECK(c.train.dim == 2);
  CHECK(c.train.width == 50);
  CHECK(c.train.normalization == Normalization::sum);
  CHECK(c.train.time_convention == TimeConvention::mean_field);
  CHECK_FALSE(c.train.constrained);
  CHECK(c.sweep_dims == std::vector<int>{1, 2, 4});
  CHECK(c.train.seed == 99);
  c.finalize();
  CHECK(c.train.source.coefficient({3, 1}) ==
        doctest::Approx(10 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("bad settings raise config errors") {
  ExperimentConfig c;
  CHECK_THROWS_AS(apply_settings(c, {{"widht", "5"}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(c, {{"width", "five"}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(c, {{"tau", ""}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(c, {{"constrained", "maybe"}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(c, {{"normalization", "max"}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(c, {{"sweep.kbars", "1,x"}}), ConfigError);
}

TEST_CASE("source specifications") {
  const CosineSeries a = resolve_source("mode 2", 3);
  CHECK(a.dim() == 3);
  CHECK(a.coefficient({2, 0, 0}) > 0.0);
  CHECK(resolve_source("mixed", 3).size() == 2);
  CHECK_THROWS_AS(resolve_source("mode 1,1,1", 2), ConfigError);
  CHECK_THROWS_AS(resolve_source("mode 0", 1), ConfigError);
  CHECK_THROWS_AS(resolve_source("mixed", 1), ConfigError);
  CHECK_THROWS_AS(resolve_source("series /nonexistent", 1), ConfigError);
  CHECK_THROWS_AS(resolve_source("wave 3", 1), ConfigError);
}

TEST_CASE("presets") {
  for (const auto& name : preset_names()) {
    ExperimentConfig c = preset(name);
    CHECK_NOTHROW(c.finalize());
    CHECK_NOTHROW(c.train.validate());
    CHECK(c.train.width == 1000);
  }
  CHECK(preset("d2k51").train.dim == 2);
  CHECK_THROWS_AS(preset("d3k1"), ConfigError);
}
