#include "mfp/field.hpp"

#include "mfp/quadrature.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mfp {

Eigen::VectorXd SampleBatch::effective_weights() const {
  if (weighted()) return weights;
  return Eigen::VectorXd::Constant(size(), 1.0 / size());
}

void canonicalize(SampleBatch& batch) {
  const int n = batch.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& pts = batch.points;
  std::sort(order.begin(), order.end(), [&pts](int l, int r) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (pts(i, l) != pts(i, r)) return pts(i, l) < pts(i, r);
    }
    return l < r;
  });
  Eigen::MatrixXd sorted(pts.rows(), n);
  Eigen::VectorXd sorted_w(batch.weighted() ? n : 0);
  for (int i = 0; i < n; ++i) {
    sorted.col(i) = pts.col(order[i]);
    if (batch.weighted()) sorted_w[i] = batch.weights[order[i]];
  }
  batch.points = std::move(sorted);
  batch.weights = std::move(sorted_w);
}

SampleBatch quadrature_batch(int dim, int level) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("quadrature_batch: requires 1 <= d <= 3");
  }
  if (level < 8 || level > 256) {
    throw std::invalid_argument("quadrature_batch: level must be in [8, 256]");
  }
  const GaussRule axis = level % 8 == 0
                             ? composite_gauss_legendre(level / 8, 8, 0.0, 1.0)
                             : gauss_legendre(level, 0.0, 1.0);
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= level;
  SampleBatch batch{Eigen::MatrixXd(dim, total), Eigen::VectorXd(total)};
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    double weight = 1.0;
    for (int i = dim - 1; i >= 0; --i) {
      const int q = rem % level;
      rem /= level;
      batch.points(i, idx) = axis.nodes[q];
      weight *= axis.weights[q];
    }
    batch.weights[idx] = weight;
  }
  return batch;
}

double feature(const Point& p, const VecRef& x,
               const MollifiedActivation& act) {
  return p.c + p.a * act.hat(p.w.dot(x) + p.b);
}

Vec feature_grad_theta(const Point& p, const VecRef& x,
                       const MollifiedActivation& act) {
  const Eigen::Index d = p.w.size();
  const HatJet jet = act.hat_jet(p.w.dot(x) + p.b);
  Vec g(d + 3);
  g[0] = 1.0;
  g[1] = jet.value;
  g.segment(2, d) = p.a * jet.slope * x;
  g[d + 2] = p.a * jet.slope;
  return g;
}

Vec feature_grad_x(const Point& p, const VecRef& x,
                   const MollifiedActivation& act) {
  return p.a * act.hat(p.w.dot(x) + p.b, 1) * p.w;
}

Eigen::MatrixXd feature_grad_x_theta(const Point& p, const VecRef& x,
                                     const MollifiedActivation& act) {
  const Eigen::Index d = p.w.size();
  const HatJet jet = act.hat_jet(p.w.dot(x) + p.b);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d, d + 3);
  jac.col(1) = jet.slope * p.w;
  // d/dw_k of a w_i s(w.x + b) = a s delta_ik + a w_i x_k s'.
  jac.block(0, 2, d, d) =
      p.a * jet.slope * Eigen::MatrixXd::Identity(d, d) +
      p.a * jet.curvature * p.w * x.transpose();
  jac.col(d + 2) = p.a * jet.curvature * p.w;
  return jac;
}

NetworkFields evaluate_network(const Cloud& cloud,
                               const Eigen::MatrixXd& points,
                               const MollifiedActivation& act) {
  const int m = cloud.size();
  const Eigen::Index n = points.cols();
  NetworkFields out{Eigen::VectorXd(n), Eigen::MatrixXd::Zero(cloud.dim(), n)};
  const double c_sum = cloud.c.sum();
  // Pre-activations in blocks so memory stays bounded for large point sets.
  constexpr Eigen::Index kBlock = 512;
  Eigen::MatrixXd pre;
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index len = std::min(kBlock, n - start);
    pre.noalias() = cloud.w.transpose() * points.middleCols(start, len);
    pre.colwise() += cloud.b;
    for (Eigen::Index i = 0; i < len; ++i) {
      double value = c_sum;
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(cloud.dim());
      for (int j = 0; j < m; ++j) {
        const HatJet jet = act.hat_jet(pre(j, i));
        if (jet.value == 0.0 && jet.slope == 0.0) continue;
        value += cloud.a[j] * jet.value;
        grad += (cloud.a[j] * jet.slope) * cloud.w.col(j);
      }
      out.value[start + i] = cloud.scale() * value;
      out.gradient.col(start + i) = cloud.scale() * grad;
    }
  }
  return out;
}

double network_eval(const Cloud& cloud, const VecRef& x,
                    const MollifiedActivation& act) {
  return evaluate_network(cloud, Eigen::MatrixXd(x), act).value[0];
}

Vec network_grad_x(const Cloud& cloud, const VecRef& x,
                   const MollifiedActivation& act) {
  return evaluate_network(cloud, Eigen::MatrixXd(x), act).gradient.col(0);
}

namespace {

Eigen::VectorXd source_values(const CosineSeries& f,
                              const Eigen::MatrixXd& points) {
  if (f.dim() != points.rows()) {
    throw std::invalid_argument("source dimension does not match the batch");
  }
  Eigen::VectorXd vals(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) vals[i] = f(points.col(i));
  return vals;
}

void check_inputs(const Cloud& cloud, const SampleBatch& batch) {
  if (batch.size() < 1) throw std::invalid_argument("empty sample batch");
  if (batch.dim() != cloud.dim()) {
    throw std::invalid_argument("batch dimension does not match the cloud");
  }
}

double energy(const NetworkFields& fields, const Eigen::VectorXd& fvals,
              const Eigen::VectorXd& weights) {
  const double mean_u = weights.dot(fields.value);
  const Eigen::VectorXd density =
      0.5 * fields.gradient.colwise().squaredNorm().transpose().array() -
      fvals.array() * fields.value.array();
  return weights.dot(density) + 0.5 * mean_u * mean_u;
}

}  // namespace

double empirical_loss(const Cloud& cloud, const SampleBatch& batch,
                      const CosineSeries& f, const MollifiedActivation& act) {
  check_inputs(cloud, batch);
  const NetworkFields fields = evaluate_network(cloud, batch.points, act);
  return energy(fields, source_values(f, batch.points),
                batch.effective_weights());
}

VelocityReport empirical_velocity(const Cloud& cloud, const SampleBatch& batch,
                                  const CosineSeries& f,
                                  const MollifiedActivation& act) {
  check_inputs(cloud, batch);
  const int m = cloud.size();
  const int n = batch.size();
  const int d = cloud.dim();
  const Eigen::MatrixXd& x = batch.points;
  const Eigen::VectorXd wt = batch.effective_weights();
  const Eigen::VectorXd fvals = source_values(f, x);

  // Hat jets of every (particle, sample) pair, then u and grad u per sample.
  Eigen::MatrixXd pre = cloud.w.transpose() * x;
  pre.colwise() += cloud.b;
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(m, n);
  Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(m, n);
  Eigen::MatrixXd h2 = Eigen::MatrixXd::Zero(m, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const HatJet jet = act.hat_jet(pre(j, i));
      h0(j, i) = jet.value;
      h1(j, i) = jet.slope;
      h2(j, i) = jet.curvature;
    }
  }
  const double s = cloud.scale();
  NetworkFields fields;
  fields.value = s * ((h0.transpose() * cloud.a).array() + cloud.c.sum());
  fields.gradient =
      s * (cloud.w * (h1.array().colwise() * cloud.a.array()).matrix());

  VelocityReport report;
  report.loss_value = energy(fields, fvals, wt);
  const double mean_u = wt.dot(fields.value);

  // q(j, i) = w_j . grad u(x_i); r_i = weight_i (f(x_i) - mean u).
  const Eigen::MatrixXd q = cloud.w.transpose() * fields.gradient;
  const Eigen::ArrayXd r = wt.array() * (fvals.array() - mean_u);
  const Eigen::ArrayXXd wt_row = wt.transpose().replicate(m, 1).array();

  const Eigen::ArrayXXd slope_w = h1.array() * wt_row;
  const Eigen::ArrayXXd inner =
      h2.array() * q.array() * wt_row - h1.array().rowwise() * r.transpose();

  report.ambient.resize(d + 3, m);
  report.ambient.row(0).setConstant(-r.sum());
  report.ambient.row(1) =
      ((h1.array() * q.array() * wt_row).rowwise().sum() -
       (h0.array().rowwise() * r.transpose()).rowwise().sum())
          .transpose();
  Eigen::MatrixXd vw = fields.gradient * slope_w.matrix().transpose() +
                       x * inner.matrix().transpose();
  report.ambient.middleRows(2, d) = vw.array().rowwise() * cloud.a.transpose().array();
  report.ambient.row(d + 2) =
      (inner.rowwise().sum() * cloud.a.array()).transpose();

  report.tangent = report.ambient;
  for (int j = 0; j < m; ++j) {
    const auto wj = cloud.w.col(j);
    const double radial = wj.dot(report.tangent.col(j).segment(2, d));
    report.tangent.col(j).segment(2, d) -= radial * wj;
  }
  return report;
}

double quadrature_loss(const Cloud& cloud, const CosineSeries& f,
                       const MollifiedActivation& act, int level) {
  if (cloud.dim() > 3) {
    throw std::invalid_argument("quadrature_loss: only d <= 3 is supported");
  }
  return empirical_loss(cloud, quadrature_batch(cloud.dim(), level), f, act);
}

}  // namespace mfp
