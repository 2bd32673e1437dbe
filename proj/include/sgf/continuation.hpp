#pragma once

#include "sgf/control.hpp"

#include <string>
#include <vector>

namespace sgf {

struct StateSweepRecord {
  double alpha = 0;
  Vec eta;
  double h1_diff = 0;     ///< |y_alpha - y_0|_H1
  double curl_sigma = 0;  ///< |curl sigma(y_alpha)|_0
  double q = 0;
  bool ok = true;
  std::string error;
};

struct StateSweep {
  std::vector<StateSweepRecord> records;  ///< alpha descending, the alpha = 0 record last
  bool complete = true;
};

/// States for a fixed control along a decreasing alpha ladder, warm started
/// from the previous alpha; alpha = 0 is appended when missing.
StateSweep run_state_sweep(const ReducedSystem& sys, double nu, const Vec& u, std::vector<double> alphas,
                           const StateOptions& opts = {});

struct SweepRecord {
  double alpha = 0;
  Vec u, eta, p;
  double J = 0;
  double gap = 0;      ///< |J_alpha - J_0|
  double u_dist = 0;   ///< |u_alpha - u_0|
  double y_dist = 0;   ///< |y_alpha - y_0|_H1
  double p_dist = 0;   ///< |p_alpha - p_0|
  double q = 0;
  int iterations = 0;
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRecord> records;  ///< alpha descending, alpha = 0 last
  double J0_cold = 0;                ///< cold-start solve at alpha = 0
  bool complete = true;

  const SweepRecord& zero() const { return records.back(); }
};

SweepResult run_control_sweep(const ReducedSystem& sys, double nu, const AdmissibleSet& set, const CostSpec& spec,
                              std::vector<double> alphas, const ControlOptions& opts = {});

/// alpha, J, gap, u_dist, y_dist_h1, p_dist, q, iterations, converged
CsvTable sweep_table(const SweepResult& r);
CsvTable state_sweep_table(const StateSweep& r);

struct NsLimitReport {
  double max_discrepancy = 0;  ///< max_k |sum_ij eta_i eta_j C_ijk - b(y, y, e_k)|
  double tensor_self = 0;      ///< tensor pairing against y itself
  double quadrature_self = 0;  ///< b(y, y, y)
};

/// Rotational versus convective form of the alpha = 0 nonlinearity.
NsLimitReport verify_ns_limit_assembly(const Discretization& d, const ModalBasis& b, const ReducedSystem& sys,
                                       const Vec& eta);

/// Checks a ladder is strictly decreasing and nonnegative and appends 0.
std::vector<double> normalize_alphas(std::vector<double> alphas);

}  // namespace sgf
