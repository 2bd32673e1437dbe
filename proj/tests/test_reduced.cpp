#include "support.hpp"

#include "sgf/reduced.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cstdio>

using namespace sgf;

namespace {

struct Setup {
  DiscretizationPtr d;
  ModalBasis b;
  ReducedSystem sys;
};

const Setup& setup(double h, Index m) {
  static std::map<std::pair<double, Index>, Setup> cache;
  auto it = cache.find({h, m});
  if (it == cache.end()) {
    Setup s;
    s.d = test::disc(2, 1, h);
    s.b = compute_eigenbasis(*s.d, m);
    s.sys = assemble_cross_tensor(*s.d, s.b);
    it = cache.emplace(std::make_pair(h, m), std::move(s)).first;
  }
  return it->second;
}

}  // namespace

TEST_CASE("cross tensor is antisymmetric in its last two slots") {
  const auto& s = setup(0.25, 10);
  for (Index i = 0; i < s.sys.m; ++i) {
    CHECK((s.sys.C[i] + s.sys.C[i].transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    for (Index j = 0; j < s.sys.m; ++j) CHECK(s.sys.c(i, j, j) == 0.0);
  }
  CHECK(s.sys.truncated(1).c(0, 0, 0) == 0.0);
  const Mat g = s.sys.Gcurl;
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
}

TEST_CASE("cross tensor matches an independent degree-8 rule") {
  const auto& s = setup(0.25, 10);
  const ModalSamples hi = sample_modes(*s.d, s.b, 8);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> pick(0, s.sys.m - 1);
  double worst = 0;
  for (int t = 0; t < 40; ++t) {
    const Index i = pick(rng), j = pick(rng), k = pick(rng);
    double v = 0;
    for (Index q = 0; q < hi.points(); ++q)
      v += hi.w(q) * hi.curl(q, i) * perp(Vec2(hi.e[j].val.col(q))).dot(hi.e[k].val.col(q));
    worst = std::max(worst, std::abs(v - s.sys.c(i, j, k)));
  }
  MESSAGE("degree 6 vs 8: " << worst);
  CHECK(worst <= 1e-10);
}

TEST_CASE("nonlinear term is energy orthogonal") {
  const auto& s = setup(0.25, 10);
  for (double alpha : {0.0, 0.1, 1.0, 10.0}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Vec eta = test::random_vec(s.sys.m, seed);
      const Vec w = s.sys.weights(alpha);
      const double v = s.sys.pairing(w.cwiseProduct(eta), eta, eta);
      const double m3 = std::pow(double(s.sys.m), 3);
      CHECK(std::abs(v) <= 1e-12 * std::pow(eta.norm(), 3) * s.sys.max_abs() * m3);
    }
  }
}

TEST_CASE("tensor pairing reconstructs the field pairing") {
  const auto& s = setup(0.25, 10);
  const ModalSamples hi = sample_modes(*s.d, s.b, 8);
  const double alpha = 0.3;
  const Vec zeta = test::random_vec(s.sys.m, 11), eta = test::random_vec(s.sys.m, 12),
            phi = test::random_vec(s.sys.m, 13);
  const Vec w = s.sys.weights(alpha);
  const VectorSamples sz = hi.combine(w.cwiseProduct(zeta));
  const VectorSamples sy = hi.combine(eta), sp = hi.combine(phi);
  double direct = 0;
  for (Index q = 0; q < hi.points(); ++q)
    direct += hi.w(q) * sz.curl(q) * perp(Vec2(sy.val.col(q))).dot(sp.val.col(q));
  const double tensor = s.sys.pairing(w.cwiseProduct(zeta), eta, phi);
  CHECK(std::abs(direct - tensor) <= 1e-10 * std::max(1.0, std::abs(direct)));
}

TEST_CASE("control maps") {
  const auto& s = setup(0.25, 10);
  const ControlMaps c = control_maps(s.sys, 4);
  Vec u = Vec::Zero(4);
  u(0) = 1;
  CHECK(c.l2(u) == 1.0);
  CHECK(c.curl(u) * c.curl(u) == doctest::Approx(s.sys.Gcurl(0, 0)).epsilon(1e-14));
  const Vec full = c.inject(u);
  CHECK(full.tail(6).isZero(0));
  // (u, e_k) through the mass matrix
  const Vec field = modal_field(s.b, full);
  for (Index k = 0; k < s.sys.m; ++k)
    CHECK(std::abs(s.b.E.col(k).dot(s.d->ops().M * field) - full(k)) <= 1e-10);

  u(1) = 1;
  const Norms n = norms(*s.d, Field::velocity(modal_field(s.b, c.inject(u))));
  const QuadratureCache& q8 = s.d->quad(8);
  const VectorSamples sv = sample_velocity(s.d->space(), q8, modal_field(s.b, c.inject(u)));
  double curl2 = 0;
  for (Index q = 0; q < sv.size(); ++q) curl2 += q8.points()[q].w * sv.curl(q) * sv.curl(q);
  const double direct = std::sqrt(n.l2 * n.l2 + curl2);
  CHECK(std::abs(c.hcurl(u) - direct) <= 1e-10 * direct);
  CHECK_THROWS_AS(control_maps(s.sys, 11), Error);
}

TEST_CASE("closed-form modal norms match quadrature") {
  const auto& s = setup(0.25, 10);
  const Vec c = test::random_vec(s.sys.m, 3);
  const Norms n = norms(*s.d, Field::velocity(modal_field(s.b, c)));
  CHECK(modal_dnorm(s.sys, c) == doctest::Approx(n.dsemi).epsilon(1e-9));
  CHECK(modal_h1(s.sys, c) == doctest::Approx(n.h1).epsilon(1e-9));
}

TEST_CASE("trilinear form") {
  const auto& s = setup(0.25, 10);
  const Field e1 = Field::velocity(s.b.E.col(0)), e2 = Field::velocity(s.b.E.col(1)),
              e3 = Field::velocity(s.b.E.col(2));
  const Field c = Field::velocity(interpolate_velocity(s.d->mesh(), [](const Vec2&) { return Vec2(0.3, -1.2); }));
  CHECK(std::abs(trilinear_b(*s.d, e1, c, e2)) <= 1e-13);

  // b(y, z, z) vanishes only up to the discrete divergence error
  std::vector<double> hs, errs, cross;
  for (double h : {0.4, 0.2, 0.1}) {
    const auto& t = setup(h, 4);
    const Field y = Field::velocity(t.b.E.col(0) + 0.5 * t.b.E.col(2));
    const Field z = Field::velocity(t.b.E.col(1) - 0.7 * t.b.E.col(3));
    hs.push_back(h);
    errs.push_back(std::abs(trilinear_b(*t.d, y, z, z)) / norms(*t.d, z).h1);
    // (curl e_i x e_j, e_k) = b(e_k, e_j, e_i) - b(e_j, e_k, e_i) up to the same error
    const Field a = Field::velocity(t.b.E.col(0)), bb = Field::velocity(t.b.E.col(1)),
                cc = Field::velocity(t.b.E.col(2));
    cross.push_back(std::abs(t.sys.c(0, 1, 2) - (trilinear_b(*t.d, cc, bb, a) - trilinear_b(*t.d, bb, cc, a))));
  }
  MESSAGE("b(y,z,z): " << errs[0] << " " << errs[1] << " " << errs[2]);
  MESSAGE("cross-product route: " << cross[0] << " " << cross[1] << " " << cross[2]);
  CHECK(errs[2] < errs[1]);
  CHECK(errs[1] < errs[0]);
  for (double v : cross) CHECK(v <= 1e-10);
  (void)e3;
}

TEST_CASE("tensor cache round trip") {
  const auto& s = setup(0.25, 10);
  const std::string path = "test_tensor_cache.bin";
  write_tensor_cache(s.sys, path);
  ReducedSystem r;
  REQUIRE(read_tensor_cache(path, s.sys.mesh_hash, 6, 6, r));
  CHECK(r.m == 6);
  CHECK((r.C[5] - s.sys.C[5].topLeftCorner(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(!read_tensor_cache(path, s.sys.mesh_hash + 1, 6, 6, r));
  CHECK(!read_tensor_cache(path, s.sys.mesh_hash, 6, 8, r));
  CHECK(!read_tensor_cache(path, s.sys.mesh_hash, 12, 6, r));
  std::remove(path.c_str());
}
