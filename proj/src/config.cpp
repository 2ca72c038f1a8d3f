#include "mfp/config.hpp"

#include "mfp/text.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace mfp {

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& tok : split(v, ',')) {
    if (trim(tok).empty()) continue;
    try {
      out.push_back(parse_int(tok));
    } catch (const std::invalid_argument&) {
      throw ConfigError(key + ": bad integer list '" + v + "'");
    }
  }
  return out;
}

template <typename F>
auto guarded(const std::string& key, const std::string& v, F&& f) {
  try {
    return f(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError(key + ": malformed value '" + v + "'");
  }
}

}  // namespace

CosineSeries resolve_source(const std::string& spec, int dim) {
  std::istringstream in(spec);
  std::string kind;
  in >> kind;
  if (kind == "mode") {
    std::string rest;
    std::getline(in, rest);
    MultiIndex k;
    for (const auto& tok : split(trim(rest), ',')) {
      if (trim(tok).empty()) continue;
      try {
        k.push_back(parse_int(tok));
      } catch (const std::invalid_argument&) {
        throw ConfigError("source: bad mode '" + rest + "'");
      }
    }
    if (k.empty()) throw ConfigError("source: mode needs indices");
    if (static_cast<int>(k.size()) > dim) {
      throw ConfigError("source: mode has more entries than dim");
    }
    k.resize(dim, 0);
    try {
      return make_source(k);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("source: ") + e.what());
    }
  }
  if (kind == "mixed") {
    if (dim < 2) throw ConfigError("source: mixed needs dim >= 2");
    return mixed_source(dim);
  }
  if (kind == "series") {
    std::string path;
    in >> path;
    std::ifstream file(path);
    if (!file) throw ConfigError("source: cannot read series file " + path);
    try {
      return read_series(file, dim);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("source: ") + e.what());
    }
  }
  throw ConfigError("source: unknown kind '" + kind +
                    "' (expected mode, mixed or series)");
}

void ExperimentConfig::finalize() {
  train.source = resolve_source(source, train.dim);
  train.source_label = source;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    out[std::string(trim(stripped.substr(0, eq)))] =
        std::string(trim(stripped.substr(eq + 1)));
  }
  return out;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  return parse_key_values(in);
}

void apply_settings(ExperimentConfig& config, const KeyValues& values) {
  TrainConfig& t = config.train;
  const auto as_int = [](const std::string& s) { return parse_int(s); };
  const auto as_ll = [](const std::string& s) { return parse_integer(s); };
  const auto as_double = [](const std::string& s) { return parse_double(s); };
  for (const auto& [key, v] : values) {
    if (key == "dim") t.dim = guarded(key, v, as_int);
    else if (key == "width") t.width = guarded(key, v, as_int);
    else if (key == "tau") t.tau = guarded(key, v, as_double);
    else if (key == "source") config.source = v;
    else if (key == "batch_size") t.batch_size = guarded(key, v, as_int);
    else if (key == "dataset_size") t.dataset_size = guarded(key, v, as_int);
    else if (key == "learning_rate") t.learning_rate = guarded(key, v, as_double);
    else if (key == "lr_mult") t.lr_mult = guarded(key, v, as_double);
    else if (key == "total_time") t.total_time = guarded(key, v, as_double);
    else if (key == "steps") t.steps = guarded(key, v, as_ll);
    else if (key == "seed") t.seed = static_cast<std::uint64_t>(guarded(key, v, as_ll));
    else if (key == "repeats") t.repeats = guarded(key, v, as_int);
    else if (key == "eval_samples") t.eval_samples = guarded(key, v, as_int);
    else if (key == "eval_every") t.eval_every = guarded(key, v, as_ll);
    else if (key == "constrained") t.constrained = parse_bool(key, v);
    else if (key == "full_batch") t.full_batch = parse_bool(key, v);
    else if (key == "quadrature_level") t.quadrature_level = guarded(key, v, as_int);
    else if (key == "record_wall_time") t.record_wall_time = parse_bool(key, v);
    else if (key == "table_resolution") t.table_resolution = guarded(key, v, as_int);
    else if (key == "output_dir") config.output_dir = v;
    else if (key == "time_convention") {
      if (v == "learning_rate" || v == "lr") {
        t.time_convention = TimeConvention::learning_rate;
      } else if (v == "mean_field") {
        t.time_convention = TimeConvention::mean_field;
      } else {
        throw ConfigError("time_convention: expected learning_rate or mean_field");
      }
    } else if (key == "normalization") {
      if (v == "mean") t.normalization = Normalization::mean;
      else if (v == "sum") t.normalization = Normalization::sum;
      else throw ConfigError("normalization: expected mean or sum");
    } else if (key == "sweep.dims") config.sweep_dims = parse_int_list(key, v);
    else if (key == "sweep.kbars") config.sweep_kbars = parse_int_list(key, v);
    else if (key == "sweep.widths") config.sweep_widths = parse_int_list(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

std::vector<std::string> preset_names() {
  return {"d1k1",  "d1k3",       "d1k5",   "d2k11",
          "d2k31", "d2k51",      "d10lowfreq", "d6mixed"};
}

ExperimentConfig preset(const std::string& name) {
  struct Entry {
    const char* name;
    int dim;
    const char* source;
  };
  static const Entry table[] = {
      {"d1k1", 1, "mode 1"},        {"d1k3", 1, "mode 3"},
      {"d1k5", 1, "mode 5"},        {"d2k11", 2, "mode 1,1"},
      {"d2k31", 2, "mode 3,1"},     {"d2k51", 2, "mode 5,1"},
      {"d10lowfreq", 10, "mode 1,1"}, {"d6mixed", 6, "mixed"},
  };
  for (const auto& e : table) {
    if (name == e.name) {
      ExperimentConfig c;
      c.train.dim = e.dim;
      c.train.width = 1000;
      c.source = e.source;
      c.output_dir = "out/" + name;
      return c;
    }
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace mfp
