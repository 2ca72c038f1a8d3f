#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <iosfwd>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mfp {

using MultiIndex = std::vector<int>;

/// Neumann eigenfunction prod_i cos(pi k_i x_i) on [0,1]^d.
template <typename Derived>
typename Derived::Scalar eigenfunction(const MultiIndex& k,
                                       const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<Eigen::Index>(k.size()) != x.size()) {
    throw std::invalid_argument("eigenfunction: dimension mismatch");
  }
  Scalar prod(1);
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] != 0) prod *= std::cos(std::numbers::pi * k[i] * x[i]);
  }
  return prod;
}

/// Sparse cosine expansion sum_k coeff(k) phi_k on [0,1]^d.
///
/// Terms are kept in lexicographic order of the multi-index so every sum
/// over the series visits terms in the same order.
class CosineSeries {
 public:
  explicit CosineSeries(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::map<MultiIndex, double>& terms() const { return terms_; }

  /// Adds `coeff` to the coefficient of `k` (creating the term if needed).
  CosineSeries& add(const MultiIndex& k, double coeff);
  double coefficient(const MultiIndex& k) const;

  /// True iff no k = 0 term is present.
  bool mean_zero() const;

  template <typename Derived>
  double operator()(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != dim_) {
      throw std::invalid_argument("CosineSeries: dimension mismatch");
    }
    double sum = 0.0;
    for (const auto& [k, coeff] : terms_) sum += coeff * eigenfunction(k, x);
    return sum;
  }

 private:
  int dim_;
  std::map<MultiIndex, double> terms_;
};

template <typename Derived>
double series_eval(const CosineSeries& s, const Eigen::MatrixBase<Derived>& x) {
  return s(x);
}

/// sum_k (1 + pi^s |k|_1^s) |coeff(k)|. For s = 0 the weight is 2 when
/// k != 0 and 1 for k = 0.
double barron_norm(const CosineSeries& s, double order);

/// f_k = pi^2 |k|_2^2 phi_k, whose Neumann solution is phi_k.
CosineSeries make_source(const MultiIndex& k);

/// 2 pi^2 sum_{i<d} cos(pi x_i) cos(pi x_{i+1}) for d >= 2.
CosineSeries mixed_source(int dim);

/// Spectral inversion of -Laplace u = f; f must be mean-zero.
CosineSeries exact_solution(const CosineSeries& f);

/// Exact L^2([0,1]^d) norm, using int phi_k^2 = 2^{-#nonzero(k)}.
double series_l2_norm(const CosineSeries& s);

/// Text form: one line per term, `k_1 ... k_d coefficient`. Blank lines and
/// lines starting with '#' are skipped. `dim` < 0 infers it from the first
/// term.
void write_series(std::ostream& out, const CosineSeries& s);
CosineSeries read_series(std::istream& in, int dim = -1);

int nonzero_count(const MultiIndex& k);

}  // namespace mfp
