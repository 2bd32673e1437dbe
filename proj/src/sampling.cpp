#include "sgf/sampling.hpp"

namespace sgf {

ModalSamples sample_modes(const Discretization& d, const ModalBasis& b, int degree) {
  const QuadratureCache& qc = d.quad(degree);
  ModalSamples s;
  s.degree = degree;
  s.w.resize(qc.size());
  s.x.resize(2, qc.size());
  for (Index q = 0; q < qc.size(); ++q) {
    s.w(q) = qc.points()[q].w;
    s.x.col(q) = qc.points()[q].x;
  }
  s.curl.resize(qc.size(), b.m);
  for (Index j = 0; j < b.m; ++j) {
    s.e.push_back(sample_velocity(d.space(), qc, b.E.col(j)));
    s.grad_pi.push_back(sample_pressure(d.space(), qc, b.Pi.col(j)).grad);
    for (Index q = 0; q < qc.size(); ++q) s.curl(q, j) = s.e.back().curl(q);
  }
  return s;
}

VectorSamples ModalSamples::combine(const Vec& c) const {
  VectorSamples out = VectorSamples::zeros(points());
  for (Index j = 0; j < c.size(); ++j)
    if (c(j) != 0.0) out.axpy(c(j), e[j]);
  return out;
}

Eigen::Matrix2Xd ModalSamples::sigma(const Vec& c, const Vec& lambda, double alpha) const {
  Eigen::Matrix2Xd out = Eigen::Matrix2Xd::Zero(2, points());
  for (Index j = 0; j < c.size(); ++j) {
    if (c(j) == 0.0) continue;
    out += c(j) * (1.0 + alpha * lambda(j)) * e[j].val;
    if (alpha != 0.0) out -= c(j) * alpha * grad_pi[j];
  }
  return out;
}

double trilinear(const Vec& w, const VectorSamples& phi, const VectorSamples& z,
                 const Eigen::Matrix2Xd& y) {
  double acc = 0;
  for (Index q = 0; q < w.size(); ++q)
    acc += w(q) * y.col(q).dot(z.grad[q] * phi.val.col(q));
  return acc;
}

}  // namespace sgf
