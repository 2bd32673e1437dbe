#include "sgf/fe_space.hpp"

#include "sgf/quadrature.hpp"

namespace sgf {

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const BoundaryFrame> frame)
    : mesh_(std::move(mesh)), frame_(std::move(frame)) {
  const Mesh& m = *mesh_;
  const BoundaryFrame& f = *frame_;
  const Index nn = m.num_nodes();
  if (static_cast<Index>(f.slot.size()) != nn)
    throw Error(ErrorKind::validation, "boundary frame does not match mesh");

  pressure_dof_.assign(nn, -1);
  for (Index i = 0; i < nn; ++i)
    if (m.is_vertex[i]) pressure_dof_[i] = static_cast<int>(n_p_++);

  constrained_dof_.assign(nn, -1);
  std::vector<Triplet> trip;
  trip.reserve(2 * nn);
  int col = 0;
  for (Index i = 0; i < nn; ++i) {
    constrained_dof_[i] = col;
    const int s = f.slot[i];
    if (s < 0) {
      trip.emplace_back(2 * i, col++, 1.0);
      trip.emplace_back(2 * i + 1, col++, 1.0);
    } else {
      const Vec2 tau = f.tau.col(s);
      trip.emplace_back(2 * i, col, tau(0));
      trip.emplace_back(2 * i + 1, col, tau(1));
      ++col;
      RotationRecord r;
      r.node = static_cast<int>(i);
      r.rotation.row(0) = f.n.col(s).transpose();
      r.rotation.row(1) = tau.transpose();
      rotations_.push_back(r);
    }
  }
  t_.resize(2 * nn, col);
  t_.setFromTriplets(trip.begin(), trip.end());
}

FeSpace build_spaces(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const BoundaryFrame> frame) {
  return FeSpace(std::move(mesh), std::move(frame));
}

void check_field(const FeSpace& space, const Field& f) {
  Index expected = 0;
  switch (f.kind) {
    case Field::Kind::velocity: expected = space.n_v(); break;
    case Field::Kind::pressure: expected = space.n_p(); break;
    case Field::Kind::scalar: expected = space.n_s(); break;
  }
  if (f.coefficients.size() != expected)
    throw Error(ErrorKind::validation, "field length " + std::to_string(f.coefficients.size()) +
                                           " does not match space (" + std::to_string(expected) +
                                           ")");
}

QuadratureCache::QuadratureCache(const Mesh& mesh, int degree) : degree_(degree) {
  const TriangleRule& rule = triangle_rule(degree);
  points_.reserve(mesh.triangles.size() * rule.size());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto X = element_coords(mesh, e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const ElementPoint p = eval_point(X, rule.points[q]);
      if (!(p.det > 0.0))
        throw Error(ErrorKind::assembly,
                    "non-positive Jacobian in triangle " + std::to_string(e));
      points_.push_back({e, rule.weights[q] * p.det, p.x, p.n2, p.dn2, p.n1, p.dn1});
    }
  }
}

VectorSamples& VectorSamples::axpy(double a, const VectorSamples& x) {
  val += a * x.val;
  for (std::size_t q = 0; q < grad.size(); ++q) grad[q] += a * x.grad[q];
  return *this;
}

VectorSamples sample_velocity(const FeSpace& space, const QuadratureCache& qc, const Vec& full) {
  const Mesh& m = space.mesh();
  VectorSamples s = VectorSamples::zeros(qc.size());
  for (Index q = 0; q < qc.size(); ++q) {
    const QuadPoint& p = qc.points()[q];
    const auto& t = m.triangles[p.tri];
    Eigen::Matrix<double, 2, 6> U;
    for (int a = 0; a < 6; ++a) U.col(a) = Vec2(full(2 * t[a]), full(2 * t[a] + 1));
    s.val.col(q) = U * p.n2;
    s.grad[q] = U * p.dn2;
  }
  return s;
}

ScalarSamples sample_scalar(const FeSpace& space, const QuadratureCache& qc, const Vec& coeffs) {
  const Mesh& m = space.mesh();
  ScalarSamples s{Vec(qc.size()), Eigen::Matrix2Xd(2, qc.size())};
  for (Index q = 0; q < qc.size(); ++q) {
    const QuadPoint& p = qc.points()[q];
    const auto& t = m.triangles[p.tri];
    P2Values c;
    for (int a = 0; a < 6; ++a) c(a) = coeffs(t[a]);
    s.val(q) = c.dot(p.n2);
    s.grad.col(q) = p.dn2.transpose() * c;
  }
  return s;
}

ScalarSamples sample_pressure(const FeSpace& space, const QuadratureCache& qc, const Vec& coeffs) {
  const Mesh& m = space.mesh();
  ScalarSamples s{Vec(qc.size()), Eigen::Matrix2Xd(2, qc.size())};
  for (Index q = 0; q < qc.size(); ++q) {
    const QuadPoint& p = qc.points()[q];
    const auto& t = m.triangles[p.tri];
    P1Values c;
    for (int a = 0; a < 3; ++a) c(a) = coeffs(space.pressure_dof(t[a]));
    s.val(q) = c.dot(p.n1);
    s.grad.col(q) = p.dn1.transpose() * c;
  }
  return s;
}

}  // namespace sgf
