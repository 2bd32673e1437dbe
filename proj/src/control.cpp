#include "sgf/control.hpp"

#include <algorithm>
#include <cmath>

namespace sgf {

void AdmissibleSet::validate(Index m) const {
  if (m_c < 1 || m_c > m)
    throw Error(ErrorKind::validation, "m_c must satisfy 1 <= m_c <= m (got " + std::to_string(m_c) + ")");
  if (!(R > 0) || !std::isfinite(R)) throw Error(ErrorKind::validation, "radius R must be > 0");
}

Vec project(const Vec& u, const AdmissibleSet& set) {
  Vec v = Vec::Zero(set.m_c);
  const Index n = std::min(u.size(), set.m_c);
  v.head(n) = u.head(n);
  const double norm = v.norm();
  if (norm > set.R) v *= set.R / norm;
  return v;
}

GradientResult reduced_gradient(const ReducedSystem& sys, const StateProblem& prob, const CostSpec& spec) {
  spec.validate(sys.m);
  GradientResult g;
  g.state = solve_state(sys, prob);
  g.J = cost(prob.u, g.state.eta, spec);
  const LinearizedOperator L = assemble_linearized(sys, g.state.eta, prob.nu, prob.alpha);
  g.p = solve_adjoint(L, g.state.eta - spec.d);
  g.grad = g.p.head(prob.u.size()) + spec.lambda_reg * prob.u;
  return g;
}

double directional_fd(const ReducedSystem& sys, const StateProblem& prob, const CostSpec& spec,
                      const Vec& w, double h) {
  StateProblem plus = prob, minus = prob;
  plus.u = prob.u + h * w;
  minus.u = prob.u - h * w;
  const double jp = cost(plus.u, solve_state(sys, plus).eta, spec);
  const double jm = cost(minus.u, solve_state(sys, minus).eta, spec);
  return (jp - jm) / (2 * h);
}

namespace {

void fill_optimality(OptimalityReport& r, const Vec& u, const Vec& g, const AdmissibleSet& set, double g0) {
  r.gradient = g;
  const double gn = g.norm();
  r.vi_scale = 2 * set.R * std::max(1.0, g0);
  double vi = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < set.m_c; ++k)
    for (double s : {1.0, -1.0}) vi = std::min(vi, s * set.R * g(k) - g.dot(u));
  r.vi_sampled = vi;
  r.vi_exact = -set.R * gn - g.dot(u);
  r.fixed_point = (u - project(u - g, set)).norm();
  r.ball_active = u.norm() >= set.R * (1 - 1e-10);
  if (r.ball_active) {
    r.mu = std::max(0.0, -g.dot(u) / set.R);
    r.kkt_residual = gn > 0 ? (g + r.mu * u / set.R).norm() / gn : 0.0;
  } else {
    r.mu = 0;
    r.kkt_residual = gn;
  }
}

}  // namespace

ControlResult solve_control(const ReducedSystem& sys, double nu, double alpha, const AdmissibleSet& set,
                            const CostSpec& spec, const ControlOptions& opts, const Vec* warm) {
  set.validate(sys.m);
  spec.validate(sys.m);
  if (!(opts.tol > 0) || opts.max_iter < 0 || !(opts.c1 > 0 && opts.c1 < 1) || !(opts.initial_step > 0))
    throw Error(ErrorKind::validation, "invalid optimizer options");

  StateProblem prob;
  prob.nu = nu;
  prob.alpha = alpha;
  prob.opts = opts.state;
  prob.u = project(warm ? *warm : Vec::Zero(set.m_c), set);
  const ControlMaps cm = control_maps(sys, set.m_c);
  auto q_of = [&](const Vec& u) { return (u.norm() + alpha * cm.curl(u)) / (nu * nu); };

  GradientResult cur = reduced_gradient(sys, prob, spec);
  const double g0 = cur.grad.norm();
  ControlResult res;
  OptimalityReport& rep = res.report;
  double step = opts.initial_step;
  Vec u_prev, g_prev;
  auto record = [&](int it, double s) {
    ControlTraceRow row;
    row.iter = it;
    row.J = cur.J;
    row.step = s;
    row.grad_norm = cur.grad.norm();
    row.u_norm = prob.u.norm();
    OptimalityReport tmp;
    fill_optimality(tmp, prob.u, cur.grad, set, g0);
    row.vi = tmp.vi_sampled;
    row.q = q_of(prob.u);
    rep.outside_certified = rep.outside_certified || row.q >= 1;
    rep.trace.push_back(row);
    return tmp.fixed_point;
  };

  double fp = record(0, 0);
  int it = 0;
  while (fp > opts.tol && it < opts.max_iter) {
    if (u_prev.size()) {
      const Vec du = prob.u - u_prev, dg = cur.grad - g_prev;
      const double sy = du.dot(dg);
      // adaptive Barzilai-Borwein: the short step when the two estimates disagree
      if (sy > 0) {
        const double bb1 = du.squaredNorm() / sy, bb2 = sy / dg.squaredNorm();
        step = std::clamp(bb2 < 0.5 * bb1 ? bb2 : bb1, 1e-10, 1e10);
      }
    }
    bool accepted = false;
    for (int b = 0; b < opts.max_backtracks; ++b, step *= 0.5) {
      StateProblem trial = prob;
      trial.u = project(prob.u - step * cur.grad, set);
      const double decrease = cur.grad.dot(trial.u - prob.u);
      if (decrease == 0.0) break;
      try {
        GradientResult next = reduced_gradient(sys, trial, spec);
        if (next.J <= cur.J + opts.c1 * decrease) {
          u_prev = prob.u;
          g_prev = cur.grad;
          prob = trial;
          cur = std::move(next);
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::solver) throw;
      }
    }
    if (!accepted) break;
    ++it;
    fp = record(it, step);
  }

  res.u = prob.u;
  res.eta = cur.state.eta;
  res.p = cur.p;
  rep.J = cur.J;
  rep.iterations = it;
  rep.q = q_of(prob.u);
  fill_optimality(rep, prob.u, cur.grad, set, g0);
  // stalled line searches at roundoff level still count as converged
  rep.converged = rep.fixed_point <= opts.tol ||
                  (it < opts.max_iter && rep.fixed_point <= 1e3 * opts.tol);
  return res;
}

CsvTable trace_table(const OptimalityReport& r) {
  CsvTable t({"iter", "J", "step", "grad_norm", "u_norm", "vi", "q"});
  for (const auto& row : r.trace)
    t.add_row({static_cast<long long>(row.iter), row.J, row.step, row.grad_norm, row.u_norm, row.vi, row.q});
  return t;
}

}  // namespace sgf
