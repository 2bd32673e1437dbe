#include "sgf/operators.hpp"

#include "sgf/quadrature.hpp"

#include <map>

namespace sgf {

SpMat symmetrized(const SpMat& a) {
  SpMat at = a.transpose();
  SpMat s = 0.5 * (a + at);
  s.prune(0.0);
  return s;
}

namespace {

std::vector<BoundaryQuadPoint> boundary_table(const Mesh& mesh) {
  std::map<std::pair<int, int>, std::pair<int, int>> owner;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3];
      owner[{std::min(i, j), std::max(i, j)}] = {e, k};
    }
  }
  const std::array<Vec2, 3> corner{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  const LineRule gl = gauss_legendre_01(5);
  std::vector<BoundaryQuadPoint> out;
  for (std::size_t be = 0; be < mesh.boundary_edges.size(); ++be) {
    const auto& edge = mesh.boundary_edges[be];
    const auto it = owner.find({std::min(edge[0], edge[1]), std::max(edge[0], edge[1])});
    if (it == owner.end())
      throw Error(ErrorKind::assembly, "boundary edge " + std::to_string(be) + " has no triangle");
    const auto [tri, k] = it->second;
    const auto X = element_coords(mesh, tri);
    const bool same = mesh.triangles[tri][k] == edge[0];
    const Vec2 v0 = corner[k], v1 = corner[(k + 1) % 3];
    for (std::size_t g = 0; g < gl.points.size(); ++g) {
      const double s = gl.points[g];
      const double r = same ? s : 1.0 - s;  // local parameter from vertex k
      const ElementPoint p = eval_point(X, v0 + r * (v1 - v0));
      Vec2 t = p.jac * (v1 - v0);
      if (!same) t = -t;
      const double len = t.norm();
      BoundaryQuadPoint q;
      q.edge = static_cast<int>(be);
      q.tri = tri;
      q.s = s;
      q.w = gl.weights[g] * len;
      q.x = p.x;
      q.normal = Vec2(t(1), -t(0)) / len;
      q.n2 = p.n2;
      q.dn2 = p.dn2;
      q.n1 = p.n1;
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace

OperatorSet assemble_operators(const FeSpace& space) {
  const Mesh& mesh = space.mesh();
  const Index nv = space.n_v(), np = space.n_p(), ns = space.n_s();
  const TriangleRule& straight = triangle_rule(4);
  const TriangleRule& curved = triangle_rule(6);

  std::vector<Triplet> tm, tk, tg, tb, tmp, tms, tss, tc;
  const std::size_t ne = mesh.triangles.size();
  tm.reserve(ne * 72);
  tk.reserve(ne * 144);
  tg.reserve(ne * 72);
  tb.reserve(ne * 36);
  tmp.reserve(ne * 9);
  tms.reserve(ne * 36);
  tss.reserve(ne * 36);
  tc.reserve(ne * 72);

  OperatorSet ops;
  ops.pmean = Vec::Zero(np);
  for (int e = 0; e < static_cast<int>(ne); ++e) {
    const auto& t = mesh.triangles[e];
    const auto X = element_coords(mesh, e);
    // the mass integrand on a curved element carries the quadratic Jacobian
    bool bent = false;
    for (int k = 0; k < 3; ++k) {
      const Vec2 mid = 0.5 * (X.col(k) + X.col((k + 1) % 3));
      bent = bent || (X.col(3 + k) - mid).norm() > 1e-13 * (X.col(k) - X.col((k + 1) % 3)).norm();
    }
    const TriangleRule& rule = bent ? curved : straight;
    Eigen::Matrix<double, 6, 6> me = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 6> ge = me;
    Eigen::Matrix<double, 12, 12> ke = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 3, 12> be = Eigen::Matrix<double, 3, 12>::Zero();
    Eigen::Matrix<double, 6, 12> ce = Eigen::Matrix<double, 6, 12>::Zero();
    Eigen::Matrix3d mpe = Eigen::Matrix3d::Zero();
    Eigen::Vector3d pme = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const ElementPoint p = eval_point(X, rule.points[q]);
      if (!(p.det > 0.0))
        throw Error(ErrorKind::assembly, "singular or inverted geometry in triangle " +
                                             std::to_string(e));
      const double w = rule.weights[q] * p.det;
      ops.area += w;
      me.noalias() += w * p.n2 * p.n2.transpose();
      ge.noalias() += w * p.dn2 * p.dn2.transpose();
      // 2 D(N_a e_c) : D(N_b e_d) = delta_cd grad N_a . grad N_b + d_d N_a d_c N_b
      for (int a = 0; a < 6; ++a)
        for (int c = 0; c < 2; ++c)
          for (int b = 0; b < 6; ++b)
            for (int d = 0; d < 2; ++d)
              ke(2 * a + c, 2 * b + d) += w * p.dn2(a, d) * p.dn2(b, c);
      for (int qq = 0; qq < 3; ++qq)
        for (int b = 0; b < 6; ++b)
          for (int d = 0; d < 2; ++d) be(qq, 2 * b + d) += w * p.n2(b) * p.dn1(qq, d);
      for (int s = 0; s < 6; ++s)
        for (int b = 0; b < 6; ++b) {
          ce(s, 2 * b) -= w * p.n2(s) * p.dn2(b, 1);
          ce(s, 2 * b + 1) += w * p.n2(s) * p.dn2(b, 0);
        }
      mpe.noalias() += w * p.n1 * p.n1.transpose();
      pme += w * p.n1;
    }
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        for (int c = 0; c < 2; ++c) {
          tm.emplace_back(2 * t[a] + c, 2 * t[b] + c, me(a, b));
          tg.emplace_back(2 * t[a] + c, 2 * t[b] + c, ge(a, b));
          ke(2 * a + c, 2 * b + c) += ge(a, b);
          for (int d = 0; d < 2; ++d)
            tk.emplace_back(2 * t[a] + c, 2 * t[b] + d, ke(2 * a + c, 2 * b + d));
        }
        tms.emplace_back(t[a], t[b], me(a, b));
        tss.emplace_back(t[a], t[b], ge(a, b));
        for (int d = 0; d < 2; ++d) tc.emplace_back(t[a], 2 * t[b] + d, ce(a, 2 * b + d));
      }
    for (int qq = 0; qq < 3; ++qq) {
      const int pq = space.pressure_dof(t[qq]);
      ops.pmean(pq) += pme(qq);
      for (int b = 0; b < 6; ++b)
        for (int d = 0; d < 2; ++d) tb.emplace_back(pq, 2 * t[b] + d, be(qq, 2 * b + d));
      for (int r = 0; r < 3; ++r) tmp.emplace_back(pq, space.pressure_dof(t[r]), mpe(qq, r));
    }
  }
  auto build = [](Index r, Index c, const std::vector<Triplet>& tr) {
    SpMat a(r, c);
    a.setFromTriplets(tr.begin(), tr.end());
    return a;
  };
  ops.M = symmetrized(build(nv, nv, tm));
  ops.K = symmetrized(build(nv, nv, tk));
  ops.G = symmetrized(build(nv, nv, tg));
  ops.B = build(np, nv, tb);
  ops.Mp = symmetrized(build(np, np, tmp));
  ops.Ms = symmetrized(build(ns, ns, tms));
  ops.Ss = symmetrized(build(ns, ns, tss));
  ops.Dcurl = build(ns, nv, tc);
  ops.boundary = boundary_table(mesh);
  return ops;
}

OperatorSet apply_slip_constraints(OperatorSet ops, const FeSpace& space) {
  const SpMat& t = space.constraint();
  const SpMat tt = t.transpose();
  ops.Mc = symmetrized(tt * ops.M * t);
  ops.Kc = symmetrized(tt * ops.K * t);
  ops.Gc = symmetrized(tt * ops.G * t);
  ops.Bc = ops.B * t;
  ops.constrained = true;
  return ops;
}

}  // namespace sgf
