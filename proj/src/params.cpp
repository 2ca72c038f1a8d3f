#include "mfp/params.hpp"

#include "mfp/rng.hpp"
#include "mfp/text.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace mfp {

bool on_manifold(const Cloud& cloud, double tol) {
  const double bound = bias_bound(cloud.dim());
  for (int j = 0; j < cloud.size(); ++j) {
    if (std::abs(cloud.w.col(j).norm() - 1.0) > tol) return false;
    if (cloud.b[j] < -bound || cloud.b[j] > bound) return false;
  }
  return true;
}

Cloud init_cloud(int m, int dim, std::uint64_t seed, double tau) {
  Cloud cloud(dim, m, tau);
  Engine rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double bound = bias_bound(dim);
  std::uniform_real_distribution<double> bias(-bound, bound);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w(dim);
    double norm = 0.0;
    do {
      for (int i = 0; i < dim; ++i) w[i] = gauss(rng);
      norm = w.norm();
    } while (norm < 1e-12);
    cloud.w.col(j) = w / norm;
    cloud.b[j] = bias(rng);
  }
  return cloud;
}

void write_snapshot(std::ostream& out, const Cloud& cloud) {
  out << cloud.dim() << ' ' << cloud.size() << ' ' << format_double(cloud.tau);
  if (cloud.normalization == Normalization::sum) out << " sum";
  out << '\n';
  for (int j = 0; j < cloud.size(); ++j) {
    out << format_double(cloud.c[j]) << ' ' << format_double(cloud.a[j]);
    for (int i = 0; i < cloud.dim(); ++i) {
      out << ' ' << format_double(cloud.w(i, j));
    }
    out << ' ' << format_double(cloud.b[j]) << '\n';
  }
}

Cloud read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_snapshot: missing header");
  }
  std::istringstream header(line);
  std::string dim_tok, m_tok, tau_tok, norm_tok;
  if (!(header >> dim_tok >> m_tok >> tau_tok)) {
    throw std::runtime_error("read_snapshot: header must be `d m tau`");
  }
  Cloud cloud(parse_int(dim_tok), parse_int(m_tok), parse_double(tau_tok));
  if (header >> norm_tok) {
    if (norm_tok != "sum" && norm_tok != "mean") {
      throw std::runtime_error("read_snapshot: unknown normalization " +
                               norm_tok);
    }
    cloud.normalization =
        norm_tok == "sum" ? Normalization::sum : Normalization::mean;
  }
  const int d = cloud.dim();
  for (int j = 0; j < cloud.size(); ++j) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("read_snapshot: truncated particle list");
    }
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (static_cast<int>(tok.size()) != d + 3) {
      throw std::runtime_error("read_snapshot: particle line " +
                               std::to_string(j) + " has wrong arity");
    }
    cloud.c[j] = parse_double(tok[0]);
    cloud.a[j] = parse_double(tok[1]);
    for (int i = 0; i < d; ++i) cloud.w(i, j) = parse_double(tok[2 + i]);
    cloud.b[j] = parse_double(tok[d + 2]);
  }
  return cloud;
}

void save_snapshot(const std::string& path, const Cloud& cloud) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot: " + path);
  write_snapshot(out, cloud);
}

Cloud load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read snapshot: " + path);
  return read_snapshot(in);
}

}  // namespace mfp
