#include "sgf/continuation.hpp"

#include <cmath>

namespace sgf {

std::vector<double> normalize_alphas(std::vector<double> alphas) {
  if (alphas.empty()) throw Error(ErrorKind::validation, "alpha list is empty");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 0) || !std::isfinite(alphas[i]))
      throw Error(ErrorKind::validation, "alpha[" + std::to_string(i) + "] must be >= 0");
    if (i && !(alphas[i] < alphas[i - 1]))
      throw Error(ErrorKind::validation, "alpha list must be strictly decreasing (at index " + std::to_string(i) + ")");
  }
  if (alphas.back() != 0.0) alphas.push_back(0.0);
  return alphas;
}

StateSweep run_state_sweep(const ReducedSystem& sys, double nu, const Vec& u, std::vector<double> alphas,
                           const StateOptions& opts) {
  alphas = normalize_alphas(std::move(alphas));
  StateSweep out;
  Vec warm;
  for (double a : alphas) {
    StateSweepRecord r;
    r.alpha = a;
    StateProblem p;
    p.nu = nu;
    p.alpha = a;
    p.u = u;
    p.opts = opts;
    try {
      const StateSolution s = solve_state(sys, p, warm.size() ? &warm : nullptr);
      r.eta = s.eta;
      r.curl_sigma = s.diag.curl_sigma;
      r.q = s.diag.q;
      warm = s.eta;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::solver) throw;
      r.ok = false;
      r.error = e.what();
      out.complete = false;
    }
    out.records.push_back(std::move(r));
  }
  const StateSweepRecord& zero = out.records.back();
  for (auto& r : out.records)
    if (r.ok && zero.ok) r.h1_diff = modal_h1(sys, r.eta - zero.eta);
  return out;
}

SweepResult run_control_sweep(const ReducedSystem& sys, double nu, const AdmissibleSet& set, const CostSpec& spec,
                              std::vector<double> alphas, const ControlOptions& opts) {
  alphas = normalize_alphas(std::move(alphas));
  SweepResult out;
  Vec warm;
  for (double a : alphas) {
    SweepRecord r;
    r.alpha = a;
    try {
      const ControlResult c = solve_control(sys, nu, a, set, spec, opts, warm.size() ? &warm : nullptr);
      r.u = c.u;
      r.eta = c.eta;
      r.p = c.p;
      r.J = c.report.J;
      r.q = c.report.q;
      r.iterations = c.report.iterations;
      r.converged = c.report.converged;
      warm = c.u;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::solver) throw;
    }
    out.complete = out.complete && r.converged;
    out.records.push_back(std::move(r));
  }
  const SweepRecord& z = out.records.back();
  if (z.converged)
    for (auto& r : out.records) {
      if (!r.converged) continue;
      r.gap = std::abs(r.J - z.J);
      r.u_dist = (r.u - z.u).norm();
      r.y_dist = modal_h1(sys, r.eta - z.eta);
      r.p_dist = (r.p - z.p).norm();
    }
  out.J0_cold = solve_control(sys, nu, 0.0, set, spec, opts).report.J;
  return out;
}

CsvTable sweep_table(const SweepResult& r) {
  CsvTable t({"alpha", "J", "gap", "u_dist", "y_dist_h1", "p_dist", "q", "iterations", "converged"});
  for (const auto& x : r.records)
    t.add_row({x.alpha, x.J, x.gap, x.u_dist, x.y_dist, x.p_dist, x.q, static_cast<long long>(x.iterations),
               static_cast<long long>(x.converged)});
  return t;
}

CsvTable state_sweep_table(const StateSweep& r) {
  CsvTable t({"alpha", "y_dist_h1", "curl_sigma", "q", "ok"});
  for (const auto& x : r.records)
    t.add_row({x.alpha, x.h1_diff, x.curl_sigma, x.q, static_cast<long long>(x.ok)});
  return t;
}

NsLimitReport verify_ns_limit_assembly(const Discretization& d, const ModalBasis& b, const ReducedSystem& sys,
                                       const Vec& eta) {
  NsLimitReport rep;
  if (eta.size() != sys.m) throw Error(ErrorKind::validation, "coefficients have wrong length");
  if (eta.isZero(0)) return rep;
  const Vec tensor = sys.nonlinear(eta, eta);
  const Field y = Field::velocity(b.E.leftCols(sys.m) * eta);
  for (Index k = 0; k < sys.m; ++k) {
    const double quad = trilinear_b(d, y, y, Field::velocity(b.E.col(k)));
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(tensor(k) - quad));
  }
  rep.tensor_self = tensor.dot(eta);
  rep.quadrature_self = trilinear_b(d, y, y, y);
  return rep;
}

}  // namespace sgf
