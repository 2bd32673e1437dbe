#pragma once

#include "sgf/io.hpp"
#include "sgf/linearized.hpp"

#include <vector>

namespace sgf {

/// Controls on the first m_c modes with |u|_0 <= R.
struct AdmissibleSet {
  Index m_c = 8;
  double R = 1;
  void validate(Index m) const;
};

/// Drops modes beyond m_c and scales onto the ball when outside it.
Vec project(const Vec& u, const AdmissibleSet& set);

struct ControlOptions {
  double tol = 1e-8;        ///< |u - P(u - grad)| at termination
  int max_iter = 200;
  double c1 = 1e-4;
  double initial_step = 1;
  int max_backtracks = 40;
  StateOptions state;
};

struct GradientResult {
  Vec grad;  ///< p + lambda_reg u on the control modes
  Vec p;     ///< adjoint coefficients, length m
  StateSolution state;
  double J = 0;
};

/// Adjoint gradient of u -> J(u, y(u)) at prob.u.
GradientResult reduced_gradient(const ReducedSystem& sys, const StateProblem& prob, const CostSpec& spec);

/// Central difference of the reduced cost along w.
double directional_fd(const ReducedSystem& sys, const StateProblem& prob, const CostSpec& spec,
                      const Vec& w, double h);

struct ControlTraceRow {
  int iter = 0;
  double J = 0;
  double step = 0;
  double grad_norm = 0;
  double u_norm = 0;
  double vi = 0;
  double q = 0;
};

struct OptimalityReport {
  double J = 0;
  Vec gradient;
  double vi_sampled = 0;   ///< min over v = +-R e_k of (grad, v - u)
  double vi_exact = 0;     ///< min over the whole ball: -R |grad| - (grad, u)
  double vi_scale = 0;     ///< 2 R max(1, |grad at the first iterate|)
  bool ball_active = false;
  double mu = 0;           ///< multiplier of the ball constraint
  double kkt_residual = 0; ///< |grad + mu u / R| / |grad|, ball-active runs
  double fixed_point = 0;
  double q = 0;
  bool outside_certified = false;  ///< some iterate had q >= 1
  int iterations = 0;
  bool converged = false;
  std::vector<ControlTraceRow> trace;
};

struct ControlResult {
  Vec u;
  Vec eta;
  Vec p;
  OptimalityReport report;
};

ControlResult solve_control(const ReducedSystem& sys, double nu, double alpha, const AdmissibleSet& set,
                            const CostSpec& spec, const ControlOptions& opts = {}, const Vec* warm = nullptr);

/// iter, J, step, grad_norm, u_norm, vi, q
CsvTable trace_table(const OptimalityReport& r);

}  // namespace sgf
