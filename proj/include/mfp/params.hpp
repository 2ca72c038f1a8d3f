#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <stdexcept>

namespace mfp {

/// Upper end of the bias interval [-sqrt(d) - 2, sqrt(d) + 2].
inline double bias_bound(int dim) { return std::sqrt(double(dim)) + 2.0; }

/// One neuron theta = (c, a, w, b). Packed vectors use the same order:
/// [c, a, w_1 .. w_d, b], length d + 3.
template <typename Scalar>
struct ParamPoint {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar c{0};
  Scalar a{0};
  Vector w;
  Scalar b{0};

  int dim() const { return static_cast<int>(w.size()); }

  Vector packed() const {
    Vector out(w.size() + 3);
    out << c, a, w, b;
    return out;
  }

  static ParamPoint unpack(const Vector& v) {
    const Eigen::Index d = v.size() - 3;
    if (d < 1) throw std::invalid_argument("ParamPoint::unpack: size < 4");
    return ParamPoint{v[0], v[1], v.segment(2, d), v[d + 2]};
  }
};

/// Projection of an ambient gradient onto T_theta = R x R x w^perp x R.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tangent_project(
    const ParamPoint<Scalar>& p, const Eigen::MatrixBase<Derived>& g) {
  const Eigen::Index d = p.w.size();
  if (g.size() != d + 3) {
    throw std::invalid_argument("tangent_project: gradient size != d + 3");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = g;
  const Scalar radial = p.w.dot(g.segment(2, d));
  out.segment(2, d) -= radial * p.w;
  return out;
}

/// Step `step * delta` followed by renormalizing w and clamping b.
/// Throws std::domain_error if w + step * delta_w collapses to ~0.
template <typename Scalar, typename Derived>
ParamPoint<Scalar> retract(const ParamPoint<Scalar>& p,
                           const Eigen::MatrixBase<Derived>& delta,
                           Scalar step) {
  const Eigen::Index d = p.w.size();
  if (delta.size() != d + 3) {
    throw std::invalid_argument("retract: delta size != d + 3");
  }
  ParamPoint<Scalar> q = p;
  q.c += step * delta[0];
  q.a += step * delta[1];
  q.w += step * delta.segment(2, d);
  const Scalar norm = q.w.norm();
  if (!(norm >= Scalar(1e-14))) {
    throw std::domain_error("retract: degenerate weight vector");
  }
  q.w /= norm;
  const Scalar bound = static_cast<Scalar>(bias_bound(static_cast<int>(d)));
  q.b = std::clamp<Scalar>(p.b + step * delta[d + 2], -bound, bound);
  return q;
}

/// Membership in K_r: |c| <= 2r and |a| <= 4r.
template <typename Scalar>
bool in_ball(const ParamPoint<Scalar>& p, Scalar r) {
  if (!(r > 0)) throw std::invalid_argument("in_ball: r must be positive");
  return std::abs(p.c) <= 2 * r && std::abs(p.a) <= 4 * r;
}

enum class Normalization {
  mean,  // u = (1/m) sum_j Phi(theta_j, .)
  sum,   // u = sum_j Phi(theta_j, .)
};

/// m particles stored column-wise; particle j is (c[j], a[j], w.col(j), b[j]).
template <typename Scalar>
struct ParticleCloud {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  ParticleCloud(int dim, int size, double tau_)
      : c(Vector::Zero(size)),
        a(Vector::Zero(size)),
        w(Matrix::Zero(dim, size)),
        b(Vector::Zero(size)),
        tau(tau_) {
    if (dim < 1 || size < 1) {
      throw std::invalid_argument("ParticleCloud: need dim >= 1 and m >= 1");
    }
  }

  int dim() const { return static_cast<int>(w.rows()); }
  int size() const { return static_cast<int>(w.cols()); }

  /// 1/m for mean normalization, 1 for sum normalization.
  Scalar scale() const {
    return normalization == Normalization::mean ? Scalar(1) / size()
                                                : Scalar(1);
  }

  ParamPoint<Scalar> particle(int j) const {
    return ParamPoint<Scalar>{c[j], a[j], w.col(j), b[j]};
  }

  void set_particle(int j, const ParamPoint<Scalar>& p) {
    c[j] = p.c;
    a[j] = p.a;
    w.col(j) = p.w;
    b[j] = p.b;
  }

  bool all_finite() const {
    return c.allFinite() && a.allFinite() && w.allFinite() && b.allFinite();
  }

  Vector c;
  Vector a;
  Matrix w;
  Vector b;
  double tau;
  Normalization normalization = Normalization::mean;
};

using Point = ParamPoint<double>;
using Cloud = ParticleCloud<double>;

/// Particles on the manifold: unit w (to `tol`) and b inside its interval.
bool on_manifold(const Cloud& cloud, double tol = 1e-12);

/// a = c = 0, w uniform on the sphere (normalized Gaussians), b uniform on
/// [-sqrt(d) - 2, sqrt(d) + 2]. Deterministic in `seed`.
Cloud init_cloud(int m, int dim, std::uint64_t seed, double tau = 4.0);

/// Snapshot: header line `d m tau` (plus ` sum` for sum normalization), then
/// one line `c a w_1 .. w_d b` per particle in shortest round-trip form.
void write_snapshot(std::ostream& out, const Cloud& cloud);
Cloud read_snapshot(std::istream& in);
void save_snapshot(const std::string& path, const Cloud& cloud);
Cloud load_snapshot(const std::string& path);

}  // namespace mfp
