#include "mfp/spectral.hpp"

#include "mfp/text.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace mfp {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_zero_index(const MultiIndex& k) {
  return std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
}

double squared_l2(const MultiIndex& k) {
  double sum = 0.0;
  for (int v : k) sum += static_cast<double>(v) * v;
  return sum;
}

}  // namespace

int nonzero_count(const MultiIndex& k) {
  return static_cast<int>(std::count_if(k.begin(), k.end(),
                                        [](int v) { return v != 0; }));
}

CosineSeries::CosineSeries(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("CosineSeries: dim < 1");
}

CosineSeries& CosineSeries::add(const MultiIndex& k, double coeff) {
  if (static_cast<int>(k.size()) != dim_) {
    throw std::invalid_argument("CosineSeries: multi-index has wrong length");
  }
  if (std::any_of(k.begin(), k.end(), [](int v) { return v < 0; })) {
    throw std::invalid_argument("CosineSeries: negative multi-index entry");
  }
  terms_[k] += coeff;
  return *this;
}

double CosineSeries::coefficient(const MultiIndex& k) const {
  const auto it = terms_.find(k);
  return it == terms_.end() ? 0.0 : it->second;
}

bool CosineSeries::mean_zero() const {
  return terms_.find(MultiIndex(dim_, 0)) == terms_.end();
}

double barron_norm(const CosineSeries& s, double order) {
  double sum = 0.0;
  for (const auto& [k, coeff] : s.terms()) {
    const double l1 = std::accumulate(k.begin(), k.end(), 0.0);
    double weight;
    if (order == 0.0) {
      weight = l1 == 0.0 ? 1.0 : 2.0;
    } else {
      weight = 1.0 + std::pow(kPi, order) * std::pow(l1, order);
    }
    sum += weight * std::abs(coeff);
  }
  return sum;
}

CosineSeries make_source(const MultiIndex& k) {
  if (k.empty()) throw std::invalid_argument("make_source: empty multi-index");
  if (is_zero_index(k)) {
    throw std::invalid_argument("make_source: k = 0 has nonzero mean");
  }
  CosineSeries f(static_cast<int>(k.size()));
  f.add(k, kPi * kPi * squared_l2(k));
  return f;
}

CosineSeries mixed_source(int dim) {
  if (dim < 2) throw std::invalid_argument("mixed_source: dim < 2");
  CosineSeries f(dim);
  for (int i = 0; i + 1 < dim; ++i) {
    MultiIndex k(dim, 0);
    k[i] = 1;
    k[i + 1] = 1;
    f.add(k, 2.0 * kPi * kPi);
  }
  return f;
}

CosineSeries exact_solution(const CosineSeries& f) {
  if (!f.mean_zero()) {
    throw std::invalid_argument("exact_solution: source has a k = 0 term");
  }
  CosineSeries u(f.dim());
  for (const auto& [k, coeff] : f.terms()) {
    u.add(k, coeff / (kPi * kPi * squared_l2(k)));
  }
  return u;
}

double series_l2_norm(const CosineSeries& s) {
  double sum = 0.0;
  for (const auto& [k, coeff] : s.terms()) {
    sum += coeff * coeff * std::ldexp(1.0, -nonzero_count(k));
  }
  return std::sqrt(sum);
}

void write_series(std::ostream& out, const CosineSeries& s) {
  for (const auto& [k, coeff] : s.terms()) {
    for (int v : k) out << v << ' ';
    out << format_double(coeff) << '\n';
  }
}

CosineSeries read_series(std::istream& in, int dim) {
  std::vector<std::pair<MultiIndex, double>> parsed;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.size() < 2) {
      throw std::runtime_error("read_series: line " + std::to_string(line_no) +
                               " needs at least one index and a coefficient");
    }
    MultiIndex k;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      k.push_back(parse_int(tokens[i]));
    }
    parsed.emplace_back(std::move(k), parse_double(tokens.back()));
  }
  if (dim < 0) {
    if (parsed.empty()) {
      throw std::runtime_error("read_series: empty series with unknown dim");
    }
    dim = static_cast<int>(parsed.front().first.size());
  }
  CosineSeries s(dim);
  for (const auto& [k, coeff] : parsed) s.add(k, coeff);
  return s;
}

}  // namespace mfp
