#pragma once

#include "sgf/constants.hpp"
#include "sgf/reduced.hpp"

#include <string>
#include <vector>

namespace sgf {

struct StateOptions {
  double tol = 1e-11;          ///< max|R| relative to max(1, |u|)
  int max_newton = 50;
  double min_damping = 1.0 / 64;
  int max_picard = 400;
  int continuation_steps = 4;
};

/// Reduced steady state equation
///   nu lambda_k eta_k + sum_ij w_i eta_i eta_j C_ijk = u_k.
struct StateProblem {
  double nu = 1;
  double alpha = 0;
  Vec u;  ///< control coefficients, length m_c <= m
  StateOptions opts;

  void validate(Index m) const;
  Vec u_full(Index m) const;
};

struct IterationRecord {
  int iter = 0;
  std::string kind;  ///< newton, picard or continuation
  double residual = 0;
  double step = 1;
};

struct StateDiagnostics {
  double dnorm = 0;       ///< |Dy|_0
  double curl_sigma = 0;  ///< |curl sigma(y)|_0
  double h1 = 0;
  double h3_proxy = 0;    ///< (|y|_H1^2 + |curl sigma(y)|^2)^(1/2)
  double q = 0;           ///< (|u| + alpha |curl u|) / nu^2
  double energy_gap = 0;  ///< |2 nu |Dy|^2 - (u, y)| / max((u, y), tiny)
};

struct StateSolution {
  Vec eta;
  double residual = 0;
  int iterations = 0;
  std::string method;
  std::vector<IterationRecord> trace;
  StateDiagnostics diag;
};

Vec state_residual(const ReducedSystem& sys, const StateProblem& prob, const Vec& eta);

/// Newton with exact Jacobian; damped Picard and load continuation as
/// fallbacks. `guess` replaces the Stokes initial guess when given.
StateSolution solve_state(const ReducedSystem& sys, const StateProblem& prob, const Vec* guess = nullptr);

StateDiagnostics state_diagnostics(const ReducedSystem& sys, const StateProblem& prob, const Vec& eta);

struct EstimateReport {
  double kappa2 = 0;
  double bound = 0;         ///< kappa2 |u| / nu
  double dnorm = 0;
  bool holds = true;        ///< |Dy| <= bound
  double ratio_curl = 0;    ///< nu |curl sigma(y)| / (|u| + alpha |curl u|)
  double ratio_h3 = 0;      ///< alpha nu |y|_H3-proxy / (|u| + alpha |curl u|)
};

EstimateReport state_estimates(const ReducedSystem& sys, const StateSolution& sol,
                               const StateProblem& prob, const ConstantsReport& consts);

/// L2 norm of curl sigma(y) + (alpha/nu) y . grad curl sigma(y) - (alpha/nu) curl u - curl y,
/// with curls taken from the projected scalar fields.
double transport_residual(const Discretization& d, const ModalBasis& b, const ReducedSystem& sys,
                          const StateSolution& sol, const StateProblem& prob);

struct UniquenessReport {
  double q = 0;
  double sigma_min = 0;
};

UniquenessReport uniqueness_monitor(const ReducedSystem& sys, const StateSolution& sol, const StateProblem& prob);

}  // namespace sgf
