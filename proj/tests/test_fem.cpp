#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sgf;

namespace {

double max_abs(const SpMat& a) {
  double m = 0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

Vec boundary_normal_trace(const Discretization& d, const Vec& y) {
  const BoundaryFrame& f = d.frame();
  Vec out(f.size());
  for (Index i = 0; i < f.size(); ++i) out(i) = f.n.col(i).dot(d.space().node_value(y, f.nodes[i]));
  return out;
}

}  // namespace

TEST_CASE("space counts on the two-triangle square") {
  const char* text =
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"
      "$Elements\n2\n1 2 2 0 1 1 2 3\n2 2 2 0 1 1 3 4\n$EndElements\n";
  DomainSpec spec;
  spec.kind = DomainSpec::Kind::external_mesh;
  auto mesh = std::make_shared<const Mesh>(parse_msh(text));
  auto frame = std::make_shared<const BoundaryFrame>(boundary_frame(*mesh, spec));
  const FeSpace s = build_spaces(mesh, frame);
  CHECK(s.n_v() == 18);
  CHECK(s.n_p() == 4);
  CHECK(s.rotations().size() == 8);
}

TEST_CASE("rotation records are orthonormal, one per boundary node") {
  const auto d = test::disc(2, 1, 0.3);
  const FeSpace& s = d->space();
  CHECK(static_cast<Index>(s.rotations().size()) == d->mesh().num_boundary_nodes());
  for (const auto& r : s.rotations())
    CHECK((r.rotation.transpose() * r.rotation - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(s.n_c() == s.n_v() - d->mesh().num_boundary_nodes());
}

TEST_CASE("operator symmetry is exact") {
  const auto d = test::disc(2, 1, 0.3);
  const auto& o = d->ops();
  CHECK(max_abs(o.K - SpMat(o.K.transpose())) == 0.0);
  CHECK(max_abs(o.M - SpMat(o.M.transpose())) == 0.0);
  CHECK(max_abs(o.Kc - SpMat(o.Kc.transpose())) == 0.0);
  CHECK(max_abs(o.Mc - SpMat(o.Mc.transpose())) == 0.0);
}

TEST_CASE("K kills constants and rigid rotations") {
  const auto d = test::disc(2, 1, 0.3);
  const auto& o = d->ops();
  const Vec c = interpolate_velocity(d->mesh(), [](const Vec2&) { return Vec2(0.3, -1.2); });
  CHECK((o.K * c).cwiseAbs().maxCoeff() <= 1e-12);
  const Vec r = interpolate_velocity(d->mesh(), [](const Vec2& x) { return Vec2(-x(1), x(0)); });
  CHECK(std::abs(r.dot(o.K * r)) <= 1e-12);
}

TEST_CASE("K on a pure strain equals 4 * area") {
  const auto d = test::disc(2, 1, 0.2);
  const Vec y = interpolate_velocity(d->mesh(), [](const Vec2& x) { return Vec2(x(0), -x(1)); });
  // independent area: sum of one-point rules is not exact on curved elements,
  // so use the degree-8 cache
  double area = 0;
  for (const auto& p : d->quad(8).points()) area += p.w;
  CHECK(y.dot(d->ops().K * y) == doctest::Approx(4 * area).epsilon(1e-12));
  CHECK(area == doctest::Approx(2 * std::numbers::pi).epsilon(1e-5));
}

TEST_CASE("norms of simple fields") {
  const auto d = test::disc(2, 1, 0.2);
  const Norms z = norms(*d, Field::velocity(Vec::Zero(d->space().n_v())));
  CHECK(z.l2 == 0);
  CHECK(z.h1 == 0);
  CHECK(z.dsemi == 0);
  CHECK(z.l4 == 0);
  CHECK(z.boundary_l2 == 0);
  const Vec c = interpolate_velocity(d->mesh(), [](const Vec2&) { return Vec2(1, 0); });
  const Norms n = norms(*d, Field::velocity(c));
  CHECK(n.l2 * n.l2 == doctest::Approx(2 * std::numbers::pi).epsilon(1e-5));
  CHECK(n.dsemi <= 1e-13);
  CHECK(std::pow(n.l4, 4) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-5));
  // perimeter of the ellipse a=2, b=1
  CHECK(n.boundary_l2 * n.boundary_l2 == doctest::Approx(9.688448220547675).epsilon(1e-6));
}

TEST_CASE("stokes solve: zero load and random load") {
  const auto d = test::disc(2, 1, 0.3);
  const Index nv = d->space().n_v();
  const auto z = stokes_solve(*d, Field::velocity(Vec::Zero(nv)), 0.0);
  CHECK(z.velocity.coefficients.norm() == 0);
  CHECK(z.pressure.coefficients.norm() == 0);

  const auto s = stokes_solve(*d, Field::velocity(test::random_vec(nv, 7)), 1.0, 0.5);
  CHECK(s.residual <= 1e-10);
  const Vec& y = s.velocity.coefficients;
  CHECK((d->ops().B * y).norm() <= 1e-12 * std::max(1.0, y.norm()));
  CHECK(boundary_normal_trace(*d, y).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, y.norm()));
  CHECK(std::abs(d->ops().pmean.dot(s.pressure.coefficients)) <= 1e-10);
}

TEST_CASE("stokes solve absorbs gradient loads") {
  std::vector<double> hs{0.4, 0.2, 0.1}, err;
  for (double h : hs) {
    const auto d = test::disc(2, 1, h);
    const Vec f = interpolate_velocity(d->mesh(), [](const Vec2& x) {
      return Vec2(2 * x(0) + x(1), x(0) - 4 * x(1));  // grad of x^2 + xy - 2y^2
    });
    const auto s = stokes_solve(*d, Field::velocity(f), 0.0);
    err.push_back(norms(*d, s.velocity).l2 / norms(*d, Field::velocity(f)).l2);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
}

TEST_CASE("helmholtz projection") {
  const auto d = test::disc(2, 1, 0.3);
  const Index nv = d->space().n_v();
  const Field v = Field::velocity(test::random_vec(nv, 11));
  const Field p = helmholtz_project(*d, v);
  const Field pp = helmholtz_project(*d, p);
  CHECK((pp.coefficients - p.coefficients).norm() <= 1e-10 * p.coefficients.norm());

  // orthogonal to every discrete gradient: (out, grad psi_q) = (B out)_q
  const Vec bp = d->ops().B * p.coefficients;
  const double pn = norms(*d, p).l2;
  for (Index q = 0; q < d->space().n_p(); ++q) {
    Vec e = Vec::Zero(d->space().n_p());
    e(q) = 1;
    const double gn = norms(*d, Field::pressure(e)).dsemi;
    CHECK(std::abs(bp(q)) <= 1e-10 * pn * gn);
  }

  // linear potentials are removed exactly
  const Vec q = test::random_vec(d->space().n_p(), 3);
  const Field g = helmholtz_project(*d, Field::velocity(Vec::Zero(nv)), q);
  CHECK(g.coefficients.norm() <= 1e-12 * q.norm());
  const Field vg = helmholtz_project(*d, v, q);
  CHECK((vg.coefficients - p.coefficients).norm() <= 1e-10 * p.coefficients.norm());
}

TEST_CASE("helmholtz projection of quadratic gradients vanishes under refinement") {
  std::vector<double> hs{0.4, 0.2, 0.1}, err;
  for (double h : hs) {
    const auto d = test::disc(2, 1, h);
    const Vec f = interpolate_velocity(d->mesh(), [](const Vec2& x) {
      return Vec2(2 * x(0) + x(1), x(0) - 4 * x(1));
    });
    const Field p = helmholtz_project(*d, Field::velocity(f));
    err.push_back(norms(*d, p).l2 / norms(*d, Field::velocity(f)).l2);
  }
  CHECK(test::loglog_slope(hs, err) >= 1.0);
}
