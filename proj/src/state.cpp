#include "sgf/state.hpp"

#include "sgf/linearized.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

namespace sgf {

void StateProblem::validate(Index m) const {
  if (!(nu > 0) || !std::isfinite(nu)) throw Error(ErrorKind::validation, "nu must be > 0");
  if (!(alpha >= 0) || !std::isfinite(alpha)) throw Error(ErrorKind::validation, "alpha must be >= 0");
  if (u.size() > m)
    throw Error(ErrorKind::validation, "control has " + std::to_string(u.size()) + " modes but the basis only " + std::to_string(m));
  if (!u.allFinite()) throw Error(ErrorKind::validation, "control coefficients must be finite");
  if (!(opts.tol > 0) || opts.max_newton < 1 || !(opts.min_damping > 0) || opts.continuation_steps < 1)
    throw Error(ErrorKind::validation, "invalid state solver options");
}

Vec StateProblem::u_full(Index m) const {
  Vec f = Vec::Zero(m);
  f.head(u.size()) = u;
  return f;
}

namespace {

Vec residual_for(const ReducedSystem& sys, double nu, const Vec& w, const Vec& uf, const Vec& eta) {
  return nu * sys.lambda.cwiseProduct(eta) + sys.nonlinear(w.cwiseProduct(eta), eta) - uf;
}

double max_abs(const Vec& r) { return r.size() ? r.cwiseAbs().maxCoeff() : 0.0; }

void check_finite(const Vec& v) {
  if (!v.allFinite()) throw Error(ErrorKind::solver, "state iteration produced NaN or Inf");
}

struct Iterate {
  const ReducedSystem& sys;
  double nu, alpha;
  Vec w, uf;
  double tol;
  const StateOptions& opts;
  std::vector<IterationRecord>& trace;
  int count = 0;

  Vec res(const Vec& eta) const { return residual_for(sys, nu, w, uf, eta); }

  bool newton(Vec& eta, const char* kind) {
    Vec r = res(eta);
    double rn = max_abs(r);
    for (int it = 0; it < opts.max_newton; ++it) {
      check_finite(r);
      if (rn <= tol) return true;
      const Mat L = linearized_matrix(sys, eta, nu, alpha);
      const Vec dx = L.partialPivLu().solve(-r);
      if (!dx.allFinite()) return false;
      double step = 1;
      bool accepted = false;
      while (step >= opts.min_damping) {
        const Vec trial = eta + step * dx;
        const Vec rt = res(trial);
        if (rt.allFinite() && max_abs(rt) < rn) {
          eta = trial;
          r = rt;
          rn = max_abs(rt);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) return rn <= tol;
      trace.push_back({++count, kind, rn, step});
    }
    return rn <= tol;
  }

  bool picard(Vec& eta) {
    const Vec inv = (nu * sys.lambda).cwiseInverse();
    Vec r = res(eta);
    double rn = max_abs(r);
    double theta = 0.5;
    for (int it = 0; it < opts.max_picard && rn > tol; ++it) {
      const Vec target = inv.cwiseProduct(uf - sys.nonlinear(w.cwiseProduct(eta), eta));
      check_finite(target);
      bool accepted = false;
      while (theta >= opts.min_damping) {
        const Vec trial = eta + theta * (target - eta);
        const Vec rt = res(trial);
        if (rt.allFinite() && max_abs(rt) < rn) {
          eta = trial;
          r = rt;
          rn = max_abs(rt);
          accepted = true;
          break;
        }
        theta *= 0.5;
      }
      if (!accepted) break;
      trace.push_back({++count, "picard", rn, theta});
    }
    return rn <= tol;
  }
};

}  // namespace

Vec state_residual(const ReducedSystem& sys, const StateProblem& prob, const Vec& eta) {
  return residual_for(sys, prob.nu, sys.weights(prob.alpha), prob.u_full(sys.m), eta);
}

StateSolution solve_state(const ReducedSystem& sys, const StateProblem& prob, const Vec* guess) {
  prob.validate(sys.m);
  const Vec uf = prob.u_full(sys.m);
  StateSolution sol;
  const double tol = prob.opts.tol * std::max(1.0, uf.norm());
  Iterate itr{sys, prob.nu, prob.alpha, sys.weights(prob.alpha), uf, tol, prob.opts, sol.trace};

  const Vec stokes = uf.cwiseQuotient(prob.nu * sys.lambda);
  Vec eta = guess && guess->size() == sys.m ? *guess : stokes;
  check_finite(eta);

  bool ok = itr.newton(eta, "newton");
  sol.method = "newton";
  if (!ok) {
    eta = stokes;
    ok = itr.picard(eta) || itr.newton(eta, "newton");
    sol.method = "picard";
  }
  Vec best = eta;
  double best_res = max_abs(itr.res(eta));
  if (!ok) {
    sol.method = "continuation";
    eta = Vec::Zero(sys.m);
    // steps of 1/continuation_steps, bisected when a step fails
    double t = 0, dt = 1.0 / prob.opts.continuation_steps;
    while (t < 1 && dt >= 1.0 / 1024) {
      const double t1 = std::min(1.0, t + dt);
      itr.uf = uf * t1;
      itr.tol = prob.opts.tol * std::max(1.0, itr.uf.norm());
      Vec trial = eta;
      if (itr.newton(trial, "continuation")) {
        eta = trial;
        t = t1;
      } else {
        dt *= 0.5;
      }
    }
    ok = t >= 1;
    itr.uf = uf;
    itr.tol = tol;
    const double r = max_abs(itr.res(eta));
    if (r < best_res) {
      best = eta;
      best_res = r;
    }
    ok = ok && r <= tol;
  }
  if (!ok)
    throw Error(ErrorKind::solver, "state solve did not converge; best residual " + std::to_string(best_res) +
                                       " (tolerance " + std::to_string(tol) + ")");
  sol.eta = eta;
  sol.residual = max_abs(itr.res(eta));
  sol.iterations = itr.count;
  sol.diag = state_diagnostics(sys, prob, eta);
  return sol;
}

StateDiagnostics state_diagnostics(const ReducedSystem& sys, const StateProblem& prob, const Vec& eta) {
  StateDiagnostics g;
  const Vec uf = prob.u_full(sys.m);
  g.dnorm = modal_dnorm(sys, eta);
  g.curl_sigma = modal_curl_sigma(sys, eta, prob.alpha);
  g.h1 = modal_h1(sys, eta);
  g.h3_proxy = std::hypot(g.h1, g.curl_sigma);
  const ControlMaps cm = control_maps(sys, std::max<Index>(1, prob.u.size()));
  const double curl_u = prob.u.size() ? cm.curl(prob.u) : 0.0;
  g.q = (prob.u.norm() + prob.alpha * curl_u) / (prob.nu * prob.nu);
  const double uy = uf.dot(eta);
  const double lhs = prob.nu * sys.lambda.dot(eta.cwiseAbs2());
  g.energy_gap = uy == 0.0 ? std::abs(lhs) : std::abs(lhs - uy) / std::abs(uy);
  return g;
}

EstimateReport state_estimates(const ReducedSystem& sys, const StateSolution& sol,
                               const StateProblem& prob, const ConstantsReport& consts) {
  EstimateReport e;
  e.kappa2 = consts.kappa2;
  const double un = prob.u.norm();
  const double curl_u = prob.u.size() ? control_maps(sys, prob.u.size()).curl(prob.u) : 0.0;
  const double data = un + prob.alpha * curl_u;
  e.bound = consts.kappa2 * un / prob.nu;
  e.dnorm = sol.diag.dnorm;
  e.holds = e.dnorm <= e.bound * (1 + 1e-12);
  if (data > 0) {
    e.ratio_curl = prob.nu * sol.diag.curl_sigma / data;
    e.ratio_h3 = prob.alpha * prob.nu * sol.diag.h3_proxy / data;
  }
  return e;
}

double transport_residual(const Discretization& d, const ModalBasis& b, const ReducedSystem& sys,
                          const StateSolution& sol, const StateProblem& prob) {
  if (prob.alpha == 0.0) return 0.0;
  const Index m = sys.m;
  const Vec& eta = sol.eta;
  const Vec uf = prob.u_full(m);
  const Mat& ce = b.curlE;
  const QuadratureCache& qc = d.quad(8);
  const Vec w = sys.weights(prob.alpha);
  const ScalarSamples omega = sample_scalar(d.space(), qc, ce.leftCols(m) * w.cwiseProduct(eta));
  const ScalarSamples cy = sample_scalar(d.space(), qc, ce.leftCols(m) * eta);
  const ScalarSamples cu = sample_scalar(d.space(), qc, ce.leftCols(m) * uf);
  const VectorSamples y = sample_velocity(d.space(), qc, b.E.leftCols(m) * eta);
  const double k = prob.alpha / prob.nu;
  double acc = 0;
  for (Index q = 0; q < qc.size(); ++q) {
    const double r = omega.val(q) + k * y.val.col(q).dot(omega.grad.col(q)) - k * cu.val(q) - cy.val(q);
    acc += qc.points()[q].w * r * r;
  }
  return std::sqrt(acc);
}

UniquenessReport uniqueness_monitor(const ReducedSystem& sys, const StateSolution& sol, const StateProblem& prob) {
  UniquenessReport u;
  u.q = sol.diag.q;
  const Mat L = linearized_matrix(sys, sol.eta, prob.nu, prob.alpha);
  u.sigma_min = Eigen::JacobiSVD<Mat>(L).singularValues().minCoeff();
  return u;
}

}  // namespace sgf
