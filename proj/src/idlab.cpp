#include "sgf/idlab.hpp"

#include "sgf/element.hpp"
#include "sgf/linearized.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <numbers>
#include <random>

namespace sgf {

namespace {

Vec gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

}  // namespace

ConstantsReport measure_constants(const Discretization& d, const ModalBasis& b, const ReducedSystem& sys,
                                  const ConstantsOptions& opts) {
  const OperatorSet& ops = d.ops();
  ConstantsReport r;
  r.mesh_hash = d.mesh_hash();
  r.n_v = d.space().n_v();
  r.m = b.m;

  PencilOptions po;
  po.shift = -std::numbers::pi / ops.area;
  const PencilResult poincare = constrained_pencil(ops.Gc, ops.Mc, ops.Bc, ops.pmean, 1, po);
  r.S2 = 1.0 / std::sqrt(poincare.mu(0));

  po.shift = 0.1;
  po.max_krylov = 240;
  po.accept = 1e-4;
  const SpMat half_k = 0.5 * ops.Kc;
  const PencilResult korn = constrained_pencil(half_k, ops.Gc, ops.Bc, ops.pmean, 1, po);
  const double mu = korn.mu(0);
  r.korn_reliable = !d.spec().axisymmetric() && mu > 1e-8;
  r.C_K = 1.0 / std::sqrt(std::max(mu, 1e-16));

  Eigen::SelfAdjointEigenSolver<Mat> gg(sys.Ggrad);
  r.S2_modal = 1.0 / std::sqrt(gg.eigenvalues()(0));

  // |y|_L4 / |grad y|_0 over random modal fields, improved by a seeded random walk
  const Index nm = std::min(opts.s4_modes, b.m);
  const QuadratureCache& qc = d.quad(8);
  Mat vx(qc.size(), nm), vy(qc.size(), nm);
  for (Index j = 0; j < nm; ++j) {
    const VectorSamples s = sample_velocity(d.space(), qc, b.E.col(j));
    vx.col(j) = s.val.row(0).transpose();
    vy.col(j) = s.val.row(1).transpose();
  }
  Vec w(qc.size());
  for (Index q = 0; q < qc.size(); ++q) w(q) = qc.points()[q].w;
  const Mat gblock = sys.Ggrad.topLeftCorner(nm, nm);
  auto ratio = [&](const Vec& c) {
    const Vec a = vx * c, bb = vy * c;
    const Vec r2 = a.cwiseAbs2() + bb.cwiseAbs2();
    const double l4 = std::pow(w.dot(r2.cwiseAbs2()), 0.25);
    return l4 / std::sqrt(c.dot(gblock * c));
  };
  std::mt19937_64 rng(opts.seed);
  const int restarts = 4;
  const int steps = std::max(1, opts.s4_samples / restarts);
  double best = 0;
  for (int k = 0; k < restarts; ++k) {
    Vec c = gaussian(nm, rng);
    double cur = ratio(c), step = 0.5;
    for (int s = 0; s < steps; ++s) {
      const Vec trial = c + step * c.norm() * gaussian(nm, rng) / std::sqrt(double(nm));
      const double v = ratio(trial);
      if (v > cur) {
        c = trial;
        cur = v;
      } else {
        step *= 0.98;
      }
    }
    best = std::max(best, cur);
  }
  r.S4_lower = best;
  r.kappa1 = r.S4_lower * r.S4_lower * std::pow(r.C_K, 3);
  r.kappa2 = r.S2 * r.C_K / 2;
  return r;
}

CurlTraceReport check_curl_trace(const Discretization& d, const Vec& full) {
  const Mesh& mesh = d.mesh();
  const BoundaryFrame& f = d.frame();
  static const std::array<Vec2, 6> ref{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)};
  Vec sum = Vec::Zero(f.size());
  Vec count = Vec::Zero(f.size());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    bool touches = false;
    for (int a = 0; a < 6; ++a) touches = touches || mesh.on_boundary[t[a]];
    if (!touches) continue;
    const auto X = element_coords(mesh, e);
    for (int a = 0; a < 6; ++a) {
      if (!mesh.on_boundary[t[a]]) continue;
      const ElementPoint p = eval_point(X, ref[a]);
      Mat2 g = Mat2::Zero();
      for (int c = 0; c < 6; ++c) g += full.segment<2>(2 * t[c]) * p.dn2.row(c);
      const int slot = f.slot[t[a]];
      sum(slot) += g(1, 0) - g(0, 1);
      count(slot) += 1;
    }
  }
  CurlTraceReport r;
  double acc = 0;
  for (Index i = 0; i < f.size(); ++i) {
    const Vec2 y = full.segment<2>(2 * f.nodes[i]);
    const double res = std::abs(sum(i) / count(i) - y.dot(f.g.col(i)));
    r.max = std::max(r.max, res);
    acc += res * res;
  }
  r.rms = f.size() ? std::sqrt(acc / double(f.size())) : 0.0;
  return r;
}

namespace {

/// Mode data for the identity checks: exact values and gradients of e_j at
/// quadrature points, plus L2-projected first derivatives (giving second
/// derivatives) and projected pressure gradients.
struct LabModes {
  Index n = 0;
  Vec lambda;
  Vec w;
  std::vector<VectorSamples> e;
  std::vector<std::array<VectorSamples, 2>> de;  ///< de[j][i]: projected d_i e_j
  std::vector<VectorSamples> g;                  ///< projected grad pi_j
  // boundary samples
  Vec bw;
  Eigen::Matrix2Xd btau;
  std::vector<VectorSamples> be, bg;
};

Vec project_scalar(const Discretization& d, const Eigen::SimplicialLDLT<SpMat>& ms, const QuadratureCache& qc,
                   const Vec& values) {
  Vec rhs = Vec::Zero(d.space().n_s());
  const Mesh& mesh = d.mesh();
  for (Index q = 0; q < qc.size(); ++q) {
    const QuadPoint& p = qc.points()[q];
    const auto& t = mesh.triangles[p.tri];
    for (int a = 0; a < 6; ++a) rhs(t[a]) += p.w * p.n2(a) * values(q);
  }
  return ms.solve(rhs);
}

VectorSamples sample_boundary(const Discretization& d, const Vec& full) {
  const auto& pts = d.ops().boundary;
  const Index n = static_cast<Index>(pts.size());
  VectorSamples s = VectorSamples::zeros(n);
  for (Index k = 0; k < n; ++k) {
    const auto& p = pts[k];
    const auto& t = d.mesh().triangles[p.tri];
    for (int a = 0; a < 6; ++a) {
      const Vec2 v = full.segment<2>(2 * t[a]);
      s.val.col(k) += p.n2(a) * v;
      s.grad[k] += v * p.dn2.row(a);
    }
  }
  return s;
}

LabModes lab_modes(const Discretization& d, const ModalBasis& b, Index n) {
  LabModes L;
  L.n = n;
  L.lambda = b.lambda.head(n);
  const QuadratureCache& q6 = d.quad(6);
  const QuadratureCache& q8 = d.quad(8);
  L.w.resize(q8.size());
  for (Index q = 0; q < q8.size(); ++q) L.w(q) = q8.points()[q].w;
  Eigen::SimplicialLDLT<SpMat> ms(d.ops().Ms);
  const auto& bp = d.ops().boundary;
  L.bw.resize(static_cast<Index>(bp.size()));
  L.btau.resize(2, static_cast<Index>(bp.size()));
  for (std::size_t k = 0; k < bp.size(); ++k) {
    L.bw(k) = bp[k].w;
    L.btau.col(k) = perp(bp[k].normal);
  }
  const Index ns = d.space().n_s();
  for (Index j = 0; j < n; ++j) {
    const VectorSamples e6 = sample_velocity(d.space(), q6, b.E.col(j));
    const ScalarSamples p6 = sample_pressure(d.space(), q6, b.Pi.col(j));
    std::array<VectorSamples, 2> de;
    for (int i = 0; i < 2; ++i) {
      Vec full(2 * ns);
      for (int l = 0; l < 2; ++l) {
        Vec vals(q6.size());
        for (Index q = 0; q < q6.size(); ++q) vals(q) = e6.grad[q](l, i);
        const Vec c = project_scalar(d, ms, q6, vals);
        for (Index s = 0; s < ns; ++s) full(2 * s + l) = c(s);
      }
      de[i] = sample_velocity(d.space(), q8, full);
    }
    Vec gfull(2 * ns);
    for (int l = 0; l < 2; ++l) {
      const Vec c = project_scalar(d, ms, q6, p6.grad.row(l).transpose());
      for (Index s = 0; s < ns; ++s) gfull(2 * s + l) = c(s);
    }
    L.e.push_back(sample_velocity(d.space(), q8, b.E.col(j)));
    L.de.push_back(de);
    L.g.push_back(sample_velocity(d.space(), q8, gfull));
    L.be.push_back(sample_boundary(d, b.E.col(j)));
    L.bg.push_back(sample_boundary(d, gfull));
  }
  return L;
}

/// Combination sum_j c_j e_j with everything the identities need.
struct Combo {
  VectorSamples y;                 ///< exact values and gradients
  std::array<VectorSamples, 2> dy; ///< projected first derivatives with gradients
  VectorSamples sigma;             ///< sigma(y) values and gradients
  Eigen::Matrix2Xd lap;            ///< Laplacian via the eigen-relation
  Vec curl_sigma;                  ///< elementwise curl of sigma(y)
  VectorSamples by;                ///< boundary values and gradients
  Eigen::Matrix2Xd blap;
};

Combo combine(const LabModes& L, const Vec& c, double alpha) {
  const Index nq = L.w.size(), nb = L.bw.size();
  Combo k;
  k.y = VectorSamples::zeros(nq);
  k.dy = {VectorSamples::zeros(nq), VectorSamples::zeros(nq)};
  k.sigma = VectorSamples::zeros(nq);
  k.lap = Eigen::Matrix2Xd::Zero(2, nq);
  k.curl_sigma = Vec::Zero(nq);
  k.by = VectorSamples::zeros(nb);
  k.blap = Eigen::Matrix2Xd::Zero(2, nb);
  for (Index j = 0; j < L.n; ++j) {
    const double cj = c(j), wj = 1 + alpha * L.lambda(j);
    k.y.axpy(cj, L.e[j]);
    k.dy[0].axpy(cj, L.de[j][0]);
    k.dy[1].axpy(cj, L.de[j][1]);
    k.sigma.axpy(cj * wj, L.e[j]);
    k.sigma.axpy(-alpha * cj, L.g[j]);
    k.lap += cj * (-L.lambda(j) * L.e[j].val + L.g[j].val);
    for (Index q = 0; q < nq; ++q) k.curl_sigma(q) += cj * wj * L.e[j].curl(q);
    k.by.axpy(cj, L.be[j]);
    k.blap += cj * (-L.lambda(j) * L.be[j].val + L.bg[j].val);
  }
  return k;
}

/// int (phi . grad z) . y with z given by its gradient samples.
double bform(const Vec& w, const Eigen::Matrix2Xd& phi, const std::vector<Mat2>& grad_z, const Eigen::Matrix2Xd& y) {
  double acc = 0;
  for (Index q = 0; q < w.size(); ++q) acc += w(q) * y.col(q).dot(grad_z[q] * phi.col(q));
  return acc;
}

/// sigma(y x z) = psi - alpha lap psi with psi = y1 z2 - y2 z1.
double sigma_cross(const Eigen::Matrix2Xd& y, const std::vector<Mat2>& gy, const Eigen::Matrix2Xd& ly,
                   const Eigen::Matrix2Xd& z, const std::vector<Mat2>& gz, const Eigen::Matrix2Xd& lz, Index q,
                   double alpha) {
  const double psi = y(0, q) * z(1, q) - y(1, q) * z(0, q);
  const double lap = ly(0, q) * z(1, q) + y(0, q) * lz(1, q) + 2 * gy[q].row(0).dot(gz[q].row(1)) -
                     ly(1, q) * z(0, q) - y(1, q) * lz(0, q) - 2 * gy[q].row(1).dot(gz[q].row(0));
  return psi - alpha * lap;
}

IdentitySample evaluate(const LabModes& L, const Combo& Y, const Combo& Z, const Combo& P, double alpha) {
  const Vec& w = L.w;
  const Index nq = w.size();
  IdentitySample s;
  // identity 1 with (y, z, phi)
  for (Index q = 0; q < nq; ++q)
    s.id1_lhs += w(q) * Y.curl_sigma(q) * perp(Vec2(Z.y.val.col(q))).dot(P.y.val.col(q));
  s.id1_rhs = bform(w, P.y.val, Z.y.grad, Y.sigma.val) - bform(w, Z.y.val, P.y.grad, Y.sigma.val);
  for (Index q = 0; q < nq; ++q)
    s.self_lhs += w(q) * Y.curl_sigma(q) * perp(Vec2(Y.y.val.col(q))).dot(Y.y.val.col(q));
  s.self_rhs = bform(w, Y.y.val, Y.y.grad, Y.sigma.val) - bform(w, Y.y.val, Y.y.grad, Y.sigma.val);

  // (curl sigma(y x z), phi) = (sigma(y x z), curl phi) - int_Gamma sigma(y x z) phi . tau
  for (Index q = 0; q < nq; ++q)
    s.id2_lhs += w(q) * sigma_cross(Y.y.val, Y.y.grad, Y.lap, Z.y.val, Z.y.grad, Z.lap, q, alpha) * P.y.curl(q);
  for (Index k = 0; k < L.bw.size(); ++k)
    s.id2_lhs -= L.bw(k) * sigma_cross(Y.by.val, Y.by.grad, Y.blap, Z.by.val, Z.by.grad, Z.blap, k, alpha) *
                 P.by.val.col(k).dot(L.btau.col(k));

  s.id2_a = bform(w, Z.y.val, Y.y.grad, P.sigma.val) - bform(w, Y.y.val, Z.y.grad, P.sigma.val);

  double b = bform(w, Z.sigma.val, Y.y.grad, P.y.val) + bform(w, Y.y.val, P.y.grad, Z.sigma.val) -
             bform(w, Y.sigma.val, Z.y.grad, P.y.val) + bform(w, Z.y.val, Y.sigma.grad, P.y.val) +
             bform(w, Y.y.val, Z.y.grad, P.y.val) - bform(w, Z.y.val, Y.y.grad, P.y.val);
  for (int i = 0; i < 2; ++i) {
    Eigen::Matrix2Xd dz(2, nq), dyv(2, nq);
    for (Index q = 0; q < nq; ++q) {
      dz.col(q) = Z.y.grad[q].col(i);
      dyv.col(q) = Y.y.grad[q].col(i);
    }
    b -= 2 * alpha * (bform(w, dz, Y.dy[i].grad, P.y.val) - bform(w, dyv, Z.dy[i].grad, P.y.val));
  }
  s.id2_b = b;
  return s;
}

}  // namespace

IdentityReport check_trilinear_identities(const Discretization& d, const ModalBasis& b, double alpha, int samples,
                                          Index modes, std::uint64_t seed) {
  if (modes < 1 || modes > b.m) throw Error(ErrorKind::validation, "identity checks need 1 <= modes <= m");
  if (!(alpha >= 0)) throw Error(ErrorKind::validation, "alpha must be >= 0");
  const LabModes L = lab_modes(d, b, modes);
  std::mt19937_64 rng(seed);
  IdentityReport r;
  r.alpha = alpha;
  for (int k = 0; k < samples; ++k) {
    const Vec cy = gaussian(modes, rng).normalized(), cz = gaussian(modes, rng).normalized(),
              cp = gaussian(modes, rng).normalized();
    r.samples.push_back(evaluate(L, combine(L, cy, alpha), combine(L, cz, alpha), combine(L, cp, alpha), alpha));
  }
  double s1 = 0, s2 = 0;
  for (const auto& s : r.samples) {
    s1 += s.id1_lhs * s.id1_lhs;
    s2 += s.id2_lhs * s.id2_lhs;
  }
  s1 = std::sqrt(s1 / samples);
  s2 = std::sqrt(s2 / samples);
  for (const auto& s : r.samples) {
    r.mismatch1 = std::max(r.mismatch1, std::abs(s.id1_lhs - s.id1_rhs) / s1);
    r.mismatch2a = std::max(r.mismatch2a, std::abs(s.id2_lhs - s.id2_a) / s2);
    r.mismatch2b = std::max(r.mismatch2b, std::abs(s.id2_lhs - s.id2_b) / s2);
    r.mismatch_ab = std::max(r.mismatch_ab, std::abs(s.id2_a - s.id2_b) / s2);
    r.self_max = std::max(r.self_max, std::max(std::abs(s.self_lhs), std::abs(s.self_rhs)) / s1);
  }
  return r;
}

IdentityRefinement identity_refinement(const DomainSpec& base, const std::vector<double>& hs, double alpha,
                                       int samples, Index modes, std::uint64_t seed) {
  IdentityRefinement out;
  std::vector<double> m1, m2a, m2b, mab;
  for (double h : hs) {
    DomainSpec s = base;
    s.h_target = h;
    const auto d = Discretization::build(s);
    const ModalBasis b = compute_eigenbasis(*d, modes);
    out.h.push_back(d->mesh().max_edge_length());
    out.reports.push_back(check_trilinear_identities(*d, b, alpha, samples, modes, seed));
    m1.push_back(out.reports.back().mismatch1);
    m2a.push_back(out.reports.back().mismatch2a);
    m2b.push_back(out.reports.back().mismatch2b);
    mab.push_back(out.reports.back().mismatch_ab);
  }
  out.slope1 = loglog_slope(out.h, m1);
  out.slope2a = loglog_slope(out.h, m2a);
  out.slope2b = loglog_slope(out.h, m2b);
  out.slope_ab = loglog_slope(out.h, mab);
  return out;
}

Rm2Report check_rm2_bound(const ReducedSystem& sys, const ConstantsReport& consts, double alpha, int samples,
                          std::uint64_t seed) {
  Rm2Report r;
  r.alpha = alpha;
  std::mt19937_64 rng(seed);
  const Index n = std::min<Index>(sys.m, 8);
  const ReducedSystem s = sys.truncated(n);
  const Vec w = s.weights(alpha), w0 = s.weights(0);
  for (int k = 0; k < samples; ++k) {
    const Vec y = gaussian(n, rng), z = gaussian(n, rng);
    const double dy = modal_dnorm(s, y), dz = modal_dnorm(s, z);
    const double v0 = std::abs(s.pairing(w0.cwiseProduct(z), y, z));
    const double bound0 = r.safety * consts.kappa1 * dy * dz * dz;
    const double ratio0 = bound0 > 0 ? v0 / bound0 : 0.0;
    r.max_ratio0 = std::max(r.max_ratio0, ratio0);
    r.holds0 = r.holds0 && v0 <= bound0 * (1 + 1e-12);
    if (alpha > 0) {
      const double va = std::abs(s.pairing(w.cwiseProduct(z), y, z));
      const double h3 = std::hypot(modal_h1(s, y), modal_curl_sigma(s, y, alpha));
      const double den = (consts.kappa1 * dy + alpha * h3) * dz * dz;
      r.max_ratio_alpha = std::max(r.max_ratio_alpha, den > 0 ? va / den : 0.0);
    }
  }
  return r;
}

std::vector<SigmaRow> check_sigma_psigma(const Discretization& d, const ModalBasis& b, const ReducedSystem& sys,
                                         const std::vector<double>& alphas, int samples, std::uint64_t seed) {
  std::vector<SigmaRow> rows;
  const Index m = sys.m;
  for (double alpha : alphas) {
    if (!(alpha >= 0)) throw Error(ErrorKind::validation, "alpha must be >= 0");
    std::mt19937_64 rng(seed);
    SigmaRow row;
    row.alpha = alpha;
    row.min_ratio = std::numeric_limits<double>::infinity();
    row.equiv_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
      Vec c = gaussian(m, rng);
      for (Index j = 0; j < m; ++j) c(j) /= 1.0 + double(j);
      const double grad = std::sqrt(c.dot(sys.Ggrad * c));
      const double gap = alpha * std::sqrt(std::max(0.0, c.dot(sys.Gpi * c)));
      const double ratio = alpha > 0 ? gap / (alpha * grad) : 0.0;
      row.max_ratio = std::max(row.max_ratio, ratio);
      row.min_ratio = std::min(row.min_ratio, ratio);
      const Vec pc = c.cwiseProduct(sys.weights(alpha));
      const double h1 = modal_h1(sys, c);
      const double eq = std::sqrt(h1 * h1 + pc.squaredNorm()) /
                        std::hypot(h1, modal_sigma_l2(sys, c, alpha));
      row.equiv_min = std::min(row.equiv_min, eq);
      row.equiv_max = std::max(row.equiv_max, eq);
      if (k == 0) {
        const Field v = Field::velocity(b.E.leftCols(m) * pc);
        const Vec q = -alpha * (b.Pi.leftCols(m) * c);
        const Field p = helmholtz_project(d, v, q);
        const Vec diff = p.coefficients - v.coefficients;
        row.projection_error = std::sqrt(diff.dot(d.ops().M * diff) / v.coefficients.dot(d.ops().M * v.coefficients));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sgf
