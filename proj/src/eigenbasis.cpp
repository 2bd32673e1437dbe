#include "sgf/eigenbasis.hpp"

#include "sgf/io.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <limits>

namespace sgf {

namespace {

// Residual of A x - mu Mb x after removing its best fit C^T p (fit in the
// Mb^-1 metric, through a saddle solve with Mb).
double pencil_residual(const SpMat& a, const SpMat& mb, const SaddleSolver& mb_saddle,
                       const Vec& x, double mu, double floor) {
  const Vec mx = mb * x;
  const Vec r = mu * mx - a * x;
  const auto sol = mb_saddle.solve(r);
  return (mb * sol.y).norm() / (std::max({std::abs(mu), floor, 1e-300}) * mx.norm());
}

PencilResult pencil_dense(const SpMat& a, const SpMat& mb, const SpMat& c, Index count) {
  const Index n = a.rows();
  const Mat ct = Mat(c).transpose();
  Eigen::ColPivHouseholderQR<Mat> qr(ct);
  const Index rank = qr.rank();
  const Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat z = q.rightCols(n - rank);
  if (count > z.cols())
    throw Error(ErrorKind::validation, "requested " + std::to_string(count) +
                                           " modes but the constrained subspace has dimension " +
                                           std::to_string(z.cols()));
  const Mat az = z.transpose() * (a * z);
  const Mat mz = z.transpose() * (mb * z);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (az + az.transpose()),
                                                   0.5 * (mz + mz.transpose()));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::solver, "dense pencil solve failed");
  return {es.eigenvalues().head(count), z * es.eigenvectors().leftCols(count)};
}

PencilResult pencil_lanczos(const SpMat& a, const SpMat& mb, const SpMat& c, const Vec& pmean,
                            Index count, const PencilOptions& opts) {
  const Index n = a.rows();
  const Index dim = n - (c.rows() - 1);
  if (count > dim)
    throw Error(ErrorKind::validation, "requested " + std::to_string(count) +
                                           " modes but the constrained subspace has dimension " +
                                           std::to_string(dim));
  const SaddleSolver op(symmetrized(a - opts.shift * mb), c, pmean);
  const SaddleSolver mb_saddle(mb, c, pmean);
  auto apply = [&](const Vec& x) { return op.solve(mb * x).y; };

  const Index kmax = std::min(dim, std::max<Index>(4 * count + 60, opts.max_krylov));
  Mat q(n, kmax), aq(n, kmax), mq(n, kmax);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  auto random_start = [&]() {
    Vec r(n);
    for (Index i = 0; i < n; ++i) r(i) = nd(rng);
    return apply(r);
  };

  Vec v = random_start();
  PencilResult best;
  double best_res = std::numeric_limits<double>::infinity();
  Index k = 0;
  for (;;) {
    // Full reorthogonalization in the Mb inner product, twice.
    double before = std::sqrt(v.dot(mb * v));
    for (int pass = 0; pass < 2 && k > 0; ++pass)
      v -= q.leftCols(k) * (mq.leftCols(k).transpose() * v);
    double beta = std::sqrt(std::max(0.0, v.dot(mb * v)));
    if (!(beta > 1e-10 * before)) {
      // Invariant subspace: continue from a fresh direction.
      v = random_start();
      for (int pass = 0; pass < 2 && k > 0; ++pass)
        v -= q.leftCols(k) * (mq.leftCols(k).transpose() * v);
      beta = std::sqrt(v.dot(mb * v));
    }
    q.col(k) = v / beta;
    aq.col(k) = a * q.col(k);
    mq.col(k) = mb * q.col(k);
    ++k;

    const bool check = (k >= count + 8 && (k - count) % 8 == 0) || k == kmax;
    if (check) {
      const Mat h = q.leftCols(k).transpose() * aq.leftCols(k);
      const Mat s = q.leftCols(k).transpose() * mq.leftCols(k);
      Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (h + h.transpose()),
                                                       0.5 * (s + s.transpose()));
      if (es.info() != Eigen::Success) throw Error(ErrorKind::solver, "Ritz step failed");
      PencilResult cur{es.eigenvalues().head(count),
                       q.leftCols(k) * es.eigenvectors().leftCols(count)};
      const double floor = std::max(1e-3 * cur.mu.cwiseAbs().maxCoeff(), std::abs(opts.shift));
      double worst = 0;
      for (Index j = 0; j < count; ++j)
        worst = std::max(worst, pencil_residual(a, mb, mb_saddle, cur.X.col(j), cur.mu(j), floor));
      if (worst < best_res) {
        best_res = worst;
        best = std::move(cur);
      }
      // Once converged, further Krylov vectors are dominated by roundoff.
      if (best_res <= opts.tol || (best_res <= 1e-8 && worst > 10 * best_res)) return best;
      if (k == kmax) {
        if (best_res <= opts.accept) return best;
        throw Error(ErrorKind::solver, "eigensolver did not converge: residual " +
                                           std::to_string(best_res) + " after " +
                                           std::to_string(k) + " Krylov vectors");
      }
    }
    v = apply(q.col(k - 1));
  }
}

/// Smooth probe with no symmetry of the ellipse; fixes eigenvector signs
/// consistently across meshes.
Vec2 sign_probe(const Vec2& x) {
  return Vec2(1.0 + 0.9 * x(0) + 0.5 * x(1) + 0.3 * x(0) * x(1) + 0.2 * x(0) * x(0),
              0.7 - 0.6 * x(0) + 0.4 * x(1) + 0.25 * x(1) * x(1) - 0.15 * x(0) * x(1));
}

}  // namespace

PencilResult constrained_pencil(const SpMat& a, const SpMat& mb, const SpMat& c,
                                const Vec& pressure_mean, Index count,
                                const PencilOptions& opts) {
  if (count < 1) throw Error(ErrorKind::validation, "mode count must be >= 1");
  bool dense = opts.route == PencilOptions::Route::dense;
  if (opts.route == PencilOptions::Route::automatic) dense = a.rows() <= opts.dense_limit;
  return dense ? pencil_dense(a, mb, c, count)
               : pencil_lanczos(a, mb, c, pressure_mean, count, opts);
}

ModalBasis compute_eigenbasis(const Discretization& d, Index m, const EigenOptions& opts) {
  const OperatorSet& ops = d.ops();
  const FeSpace& space = d.space();
  if (m < 1) throw Error(ErrorKind::validation, "m must be >= 1");
  PencilOptions po = opts.pencil;
  if (po.shift == 0) po.shift = -std::numbers::pi / ops.area;
  PencilResult pr = constrained_pencil(ops.Kc, ops.Mc, ops.Bc, ops.pmean, m, po);

  // final Rayleigh-Ritz pass: M-orthonormal to roundoff
  {
    Mat g = pr.X.transpose() * (ops.Mc * pr.X);
    Mat k = pr.X.transpose() * (ops.Kc * pr.X);
    g = 0.5 * (g + g.transpose()).eval();
    k = 0.5 * (k + k.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> rr(k, g);
    pr.mu = rr.eigenvalues();
    pr.X = pr.X * rr.eigenvectors();
  }

  ModalBasis b;
  b.m = m;
  b.lambda = pr.mu;
  b.Ec = pr.X;
  b.mesh_hash = d.mesh_hash();

  const Vec probe = ops.M * interpolate_velocity(d.mesh(), sign_probe);
  b.E.resize(space.n_v(), m);
  for (Index j = 0; j < m; ++j) {
    Vec e = space.expand(b.Ec.col(j));
    double s = e.dot(probe);
    if (std::abs(s) <= 1e-8 * std::sqrt(e.dot(ops.M * e)) * probe.norm()) {
      Index imax;
      e.cwiseAbs().maxCoeff(&imax);
      s = e(imax);
    }
    if (s < 0) b.Ec.col(j) = -b.Ec.col(j);
    b.E.col(j) = space.expand(b.Ec.col(j));
  }

  b.Pi.resize(space.n_p(), m);
  const double lam_floor = 1e-3 * std::abs(b.lambda(m - 1));
  for (Index j = 0; j < m; ++j) {
    const Vec e = b.Ec.col(j);
    const Vec me = ops.Mc * e;
    const Vec r = b.lambda(j) * me - ops.Kc * e;
    const auto sol = d.mass_saddle().solve(r);
    b.Pi.col(j) = sol.p;
    const Vec res = ops.Kc * e - b.lambda(j) * me + ops.Bc.transpose() * sol.p;
    b.max_residual = std::max(b.max_residual, res.norm() / (std::max(std::abs(b.lambda(j)), lam_floor) * me.norm()));
  }
  if (!(b.max_residual <= opts.residual_tol))
    throw Error(ErrorKind::solver,
                "eigen residual " + std::to_string(b.max_residual) + " exceeds tolerance");

  Eigen::SimplicialLDLT<SpMat> ms(ops.Ms);
  b.curlE = ms.solve(Mat(ops.Dcurl * b.E));
  return b;
}

PsigmaReport verify_psigma_identity(const Discretization& d, const ModalBasis& b, double alpha) {
  const OperatorSet& ops = d.ops();
  const Mesh& mesh = d.mesh();
  const FeSpace& space = d.space();
  PsigmaReport rep;
  rep.alpha = alpha;
  Eigen::SimplicialLDLT<SpMat> mfull(ops.M);

  // nodal averaging of the elementwise gradient of a linear pressure
  const std::array<Vec2, 6> ref{Vec2(0, 0),   Vec2(1, 0),     Vec2(0, 1),
                                Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)};
  auto nodal_gradient = [&](const Vec& pi) {
    Vec g = Vec::Zero(space.n_v());
    std::vector<int> count(mesh.num_nodes(), 0);
    for (int e = 0; e < mesh.num_triangles(); ++e) {
      const auto& t = mesh.triangles[e];
      const auto X = element_coords(mesh, e);
      P1Values c;
      for (int a = 0; a < 3; ++a) c(a) = pi(space.pressure_dof(t[a]));
      for (int a = 0; a < 6; ++a) {
        const ElementPoint p = eval_point(X, ref[a]);
        g.segment<2>(2 * t[a]) += p.dn1.transpose() * c;
        ++count[t[a]];
      }
    }
    for (Index i = 0; i < mesh.num_nodes(); ++i) g.segment<2>(2 * i) /= count[i];
    return g;
  };

  for (Index j = 0; j < b.m; ++j) {
    const double w = 1.0 + alpha * b.lambda(j);
    const Vec e = b.E.col(j);
    auto residual = [&](const Vec& grad_pi) {
      const Field sig = Field::velocity(w * e - alpha * grad_pi);
      const Vec r = helmholtz_project(d, sig).coefficients - w * e;
      return std::sqrt(std::max(0.0, r.dot(ops.M * r))) / w;
    };
    if (alpha == 0.0) {
      const double r0 = residual(Vec::Zero(space.n_v()));
      rep.projected.push_back(r0);
      rep.nodal.push_back(r0);
      continue;
    }
    rep.projected.push_back(residual(mfull.solve(ops.B.transpose() * b.Pi.col(j))));
    rep.nodal.push_back(residual(nodal_gradient(b.Pi.col(j))));
  }
  return rep;
}

void write_basis_cache(const ModalBasis& b, const std::string& path, double tol) {
  Json h;
  h["format"] = "sgf-modal-basis";
  h["version"] = 1;
  h["mesh_hash"] = hex64(b.mesh_hash);
  h["m"] = b.m;
  h["n_v"] = b.E.rows();
  h["n_p"] = b.Pi.rows();
  h["n_s"] = b.curlE.rows();
  h["lambda"] = std::vector<double>(b.lambda.data(), b.lambda.data() + b.lambda.size());
  h["tolerances"] = {{"residual", tol}};
  h["max_residual"] = b.max_residual;
  h["payload"] = {"E", "Pi", "curlE"};
  write_blob(path, h, {&b.E, &b.Pi, &b.curlE});
}

bool read_basis_cache(const std::string& path, std::uint64_t mesh_hash, Index m,
                      const Discretization& d, ModalBasis& out) {
  Blob blob;
  try {
    blob = read_blob(path);
  } catch (const Error&) {
    return false;
  }
  const Json& h = blob.header;
  if (h.value("format", "") != "sgf-modal-basis" || h.value("version", 0) != 1) return false;
  if (h.value("mesh_hash", "") != hex64(mesh_hash)) return false;
  if (h.value("m", Index(0)) < m) return false;
  const Index mc = h["m"].get<Index>();
  const Index nv = h["n_v"].get<Index>(), np = h["n_p"].get<Index>(), ns = h["n_s"].get<Index>();
  if (nv != d.space().n_v() || np != d.space().n_p() || ns != d.space().n_s()) return false;
  if (static_cast<Index>(blob.data.size()) != mc * (nv + np + ns)) return false;
  const double* p = blob.data.data();
  ModalBasis b;
  b.m = m;
  const auto lam = h["lambda"].get<std::vector<double>>();
  b.lambda = Eigen::Map<const Vec>(lam.data(), m);
  b.E = Eigen::Map<const Mat>(p, nv, mc).leftCols(m);
  p += nv * mc;
  b.Pi = Eigen::Map<const Mat>(p, np, mc).leftCols(m);
  p += np * mc;
  b.curlE = Eigen::Map<const Mat>(p, ns, mc).leftCols(m);
  b.Ec.resize(d.space().n_c(), m);
  for (Index j = 0; j < m; ++j) b.Ec.col(j) = d.space().compress(b.E.col(j));
  b.mesh_hash = mesh_hash;
  b.max_residual = h.value("max_residual", 0.0);
  out = std::move(b);
  return true;
}

}  // namespace sgf
