#include "sgf/linearized.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace sgf {

Mat linearized_matrix(const ReducedSystem& sys, const Vec& eta, double nu, double alpha) {
  if (eta.size() != sys.m) throw Error(ErrorKind::validation, "base state has wrong length");
  const Vec w = sys.weights(alpha);
  Mat L = sys.contract_first(w.cwiseProduct(eta)).transpose();
  for (Index l = 0; l < sys.m; ++l) L.col(l) += w(l) * (sys.C[l].transpose() * eta);
  L.diagonal() += nu * sys.lambda;
  return L;
}

LinearizedOperator::LinearizedOperator(const ReducedSystem& sys, const Vec& eta, double nu, double alpha)
    : L_(linearized_matrix(sys, eta, nu, alpha)), eta_(eta), nu_(nu), alpha_(alpha) {
  const Vec s = Eigen::JacobiSVD<Mat>(L_).singularValues();
  smax_ = s.maxCoeff();
  smin_ = s.minCoeff();
  lu_.compute(L_);
}

void LinearizedOperator::require_regular() const {
  if (!(smin_ > 1e-13 * smax_))
    throw Error(ErrorKind::solver, "linearized operator is singular (sigma_min " + std::to_string(smin_) +
                                       "); check the uniqueness monitor");
}

Vec LinearizedOperator::solve(const Vec& w) const {
  require_regular();
  return lu_.solve(w);
}

Vec LinearizedOperator::solve_transpose(const Vec& f) const {
  require_regular();
  return lu_.transpose().solve(f);
}

LinearizedOperator assemble_linearized(const ReducedSystem& sys, const Vec& eta, double nu, double alpha) {
  return LinearizedOperator(sys, eta, nu, alpha);
}

LinearizedSolution solve_linearized(const ReducedSystem& sys, const LinearizedOperator& L, const Vec& w) {
  if (w.size() != L.matrix().rows()) throw Error(ErrorKind::validation, "right side has wrong length");
  LinearizedSolution s;
  s.z = L.solve(w);
  const double wn = w.norm();
  if (wn == 0.0) return s;
  s.residual = (L.matrix() * s.z - w).norm() / wn;
  const double dz = modal_dnorm(sys, s.z);
  s.ratio_h1 = L.nu() * dz / wn;
  const double rhs = (1 + L.alpha()) * dz + L.alpha() * wn / L.nu();
  s.ratio_v2 = rhs > 0 ? modal_sigma_l2(sys, s.z, L.alpha()) / rhs : 0.0;
  return s;
}

Vec solve_adjoint(const LinearizedOperator& L, const Vec& f) {
  if (f.size() != L.matrix().rows()) throw Error(ErrorKind::validation, "right side has wrong length");
  return L.solve_transpose(f);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    n += 1;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GateauxReport gateaux_check(const ReducedSystem& sys, const StateProblem& prob, const Vec& w,
                            const std::vector<double>& rhos, const CostSpec& cost_spec) {
  prob.validate(sys.m);
  cost_spec.validate(sys.m);
  if (w.size() != prob.u.size()) throw Error(ErrorKind::validation, "direction and control differ in length");
  const StateSolution base = solve_state(sys, prob);
  const LinearizedOperator L = assemble_linearized(sys, base.eta, prob.nu, prob.alpha);
  Vec wf = Vec::Zero(sys.m);
  wf.head(w.size()) = w;
  const Vec z = L.solve(wf);
  const double J0 = cost(prob.u, base.eta, cost_spec);

  GateauxReport rep;
  rep.dJ = z.dot(base.eta - cost_spec.d) + cost_spec.lambda_reg * prob.u.dot(w);
  std::vector<double> rs, er, ec;
  for (double rho : rhos) {
    GateauxRow row;
    row.rho = rho;
    StateProblem pr = prob;
    pr.u = prob.u + rho * w;
    try {
      const Vec guess = base.eta + rho * z;
      const StateSolution s = solve_state(sys, pr, &guess);
      const Vec r = (s.eta - base.eta) / rho - z;
      row.dnorm_r = modal_dnorm(sys, r);
      row.cost_remainder = std::abs(cost(pr.u, s.eta, cost_spec) - J0 - rho * rep.dJ) / rho;
      rs.push_back(rho);
      er.push_back(row.dnorm_r);
      ec.push_back(row.cost_remainder);
    } catch (const Error&) {
      row.solved = false;
      rep.complete = false;
    }
    rep.rows.push_back(row);
  }
  rep.slope_r = loglog_slope(rs, er);
  rep.slope_cost = loglog_slope(rs, ec);
  return rep;
}

LipschitzReport lipschitz_check(const ReducedSystem& sys, const StateProblem& prob, const Vec& u1,
                                const Vec& u2) {
  StateProblem p1 = prob, p2 = prob;
  p1.u = u1;
  p2.u = u2;
  const StateSolution s1 = solve_state(sys, p1), s2 = solve_state(sys, p2);
  LipschitzReport rep;
  rep.q1 = s1.diag.q;
  rep.q2 = s2.diag.q;
  const double du = (u1 - u2).norm();
  if (du == 0.0) return rep;
  const Vec dy = s1.eta - s2.eta;
  const double dd = modal_dnorm(sys, dy);
  rep.ratio_h1 = prob.nu * dd / du;
  const double a = prob.alpha, nu = prob.nu;
  const double data1 = u1.norm() + a * control_maps(sys, u1.size()).curl(u1);
  const double rhs = (1 + a + a / (nu * nu * nu) * std::pow(data1, 1.5)) * dd + a / nu * du;
  rep.ratio_v2 = rhs > 0 ? modal_sigma_l2(sys, dy, a) / rhs : 0.0;
  return rep;
}

}  // namespace sgf
