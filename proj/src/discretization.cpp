#include "sgf/discretization.hpp"

#include <cmath>

namespace sgf {

DiscretizationPtr Discretization::build(const DomainSpec& spec) {
  spec.validate();
  return from_mesh(make_mesh(spec), spec);
}

DiscretizationPtr Discretization::from_mesh(Mesh mesh, const DomainSpec& spec) {
  std::shared_ptr<Discretization> d(new Discretization());
  d->spec_ = spec;
  d->mesh_ = std::make_shared<const Mesh>(std::move(mesh));
  d->hash_ = d->mesh_->hash();
  d->frame_ = std::make_shared<const BoundaryFrame>(boundary_frame(*d->mesh_, spec));
  d->space_ = std::make_shared<const FeSpace>(d->mesh_, d->frame_);
  d->ops_ = apply_slip_constraints(assemble_operators(*d->space_), *d->space_);
  d->q4_ = std::make_unique<QuadratureCache>(*d->mesh_, 4);
  d->q6_ = std::make_unique<QuadratureCache>(*d->mesh_, 6);
  d->q8_ = std::make_unique<QuadratureCache>(*d->mesh_, 8);
  d->mass_saddle_ = std::make_unique<SaddleSolver>(d->ops_.Mc, d->ops_.Bc, d->ops_.pmean);
  return d;
}

const QuadratureCache& Discretization::quad(int degree) const {
  switch (degree) {
    case 4: return *q4_;
    case 6: return *q6_;
    case 8: return *q8_;
  }
  throw Error(ErrorKind::validation, "no cached quadrature of degree " + std::to_string(degree));
}

StokesResult stokes_solve(const Discretization& d, const Field& f, double gamma, double nu) {
  check_field(d.space(), f);
  if (f.kind != Field::Kind::velocity)
    throw Error(ErrorKind::validation, "stokes_solve: load must be a velocity field");
  if (!(gamma >= 0) || !(nu > 0))
    throw Error(ErrorKind::validation, "stokes_solve: need gamma >= 0 and nu > 0");
  const OperatorSet& ops = d.ops();
  const SpMat a = symmetrized(gamma * ops.Mc + nu * ops.Kc);
  const SaddleSolver solver(a, ops.Bc, ops.pmean);
  const Vec rhs = d.space().restrict_load(ops.M * f.coefficients);
  auto sol = solver.solve(rhs);

  const Vec r1 = a * sol.y + ops.Bc.transpose() * sol.p - rhs;
  const Vec r2 = ops.Bc * sol.y;
  const double scale = std::max(rhs.norm(), 1e-300);
  StokesResult out;
  out.residual = std::sqrt(r1.squaredNorm() + r2.squaredNorm()) / scale;
  if (rhs.norm() == 0.0) out.residual = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
  out.velocity = Field::velocity(d.space().expand(sol.y));
  out.pressure = Field::pressure(sol.p);
  return out;
}

Field helmholtz_project(const Discretization& d, const Field& v, const Vec& q) {
  check_field(d.space(), v);
  if (v.kind != Field::Kind::velocity)
    throw Error(ErrorKind::validation, "helmholtz_project: velocity field required");
  const OperatorSet& ops = d.ops();
  Vec load = ops.M * v.coefficients;
  if (q.size() > 0) {
    if (q.size() != d.space().n_p())
      throw Error(ErrorKind::validation, "helmholtz_project: potential has wrong length");
    load += ops.B.transpose() * q;
  }
  const auto sol = d.mass_saddle().solve(d.space().restrict_load(load));
  return Field::velocity(d.space().expand(sol.y));
}

Field helmholtz_project(const Discretization& d, const Field& v) {
  return helmholtz_project(d, v, Vec());
}

Norms norms(const Discretization& d, const Field& v) {
  check_field(d.space(), v);
  const QuadratureCache& qc = d.quad(8);
  const Mesh& mesh = d.mesh();
  Norms n;
  double l2 = 0, grad2 = 0, d2 = 0, l4 = 0, bnd = 0;
  if (v.kind == Field::Kind::velocity) {
    const VectorSamples s = sample_velocity(d.space(), qc, v.coefficients);
    for (Index q = 0; q < s.size(); ++q) {
      const double w = qc.points()[q].w;
      const double v2 = s.val.col(q).squaredNorm();
      const Mat2& g = s.grad[q];
      l2 += w * v2;
      l4 += w * v2 * v2;
      grad2 += w * g.squaredNorm();
      d2 += w * (0.5 * (g + g.transpose())).squaredNorm();
    }
    for (const auto& p : d.ops().boundary) {
      const auto& t = mesh.triangles[p.tri];
      Vec2 val = Vec2::Zero();
      for (int a = 0; a < 6; ++a) val += p.n2(a) * v.coefficients.segment<2>(2 * t[a]);
      bnd += p.w * val.squaredNorm();
    }
  } else {
    const bool pressure = v.kind == Field::Kind::pressure;
    const ScalarSamples s = pressure ? sample_pressure(d.space(), qc, v.coefficients)
                                     : sample_scalar(d.space(), qc, v.coefficients);
    for (Index q = 0; q < s.val.size(); ++q) {
      const double w = qc.points()[q].w;
      const double v2 = s.val(q) * s.val(q);
      l2 += w * v2;
      l4 += w * v2 * v2;
      grad2 += w * s.grad.col(q).squaredNorm();
    }
    d2 = grad2;
    for (const auto& p : d.ops().boundary) {
      const auto& t = mesh.triangles[p.tri];
      double val = 0;
      if (pressure)
        for (int a = 0; a < 3; ++a) val += p.n1(a) * v.coefficients(d.space().pressure_dof(t[a]));
      else
        for (int a = 0; a < 6; ++a) val += p.n2(a) * v.coefficients(t[a]);
      bnd += p.w * val * val;
    }
  }
  n.l2 = std::sqrt(l2);
  n.h1 = std::sqrt(l2 + grad2);
  n.dsemi = std::sqrt(d2);
  n.l4 = std::pow(l4, 0.25);
  n.boundary_l2 = std::sqrt(bnd);
  return n;
}

double tangential_stress_residual(const Discretization& d, const Vec& y) {
  const Mesh& mesh = d.mesh();
  double acc = 0;
  for (const auto& p : d.ops().boundary) {
    const auto& t = mesh.triangles[p.tri];
    Mat2 g = Mat2::Zero();
    for (int a = 0; a < 6; ++a) g += y.segment<2>(2 * t[a]) * p.dn2.row(a);
    const Mat2 dy = 0.5 * (g + g.transpose());
    const double s = p.normal.dot(dy * perp(p.normal));
    acc += p.w * s * s;
  }
  return std::sqrt(acc);
}

}  // namespace sgf
