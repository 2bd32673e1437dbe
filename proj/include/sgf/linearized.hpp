#pragma once

#include "sgf/cost.hpp"
#include "sgf/state.hpp"

#include <Eigen/LU>

#include <vector>

namespace sgf {

/// L_kj = nu lambda_k delta_kj + sum_i eta_i (w_j C_jik + w_i C_ijk), the
/// Jacobian of the state residual.
Mat linearized_matrix(const ReducedSystem& sys, const Vec& eta, double nu, double alpha);

class LinearizedOperator {
 public:
  LinearizedOperator(const ReducedSystem& sys, const Vec& eta, double nu, double alpha);

  const Mat& matrix() const { return L_; }
  const Vec& eta() const { return eta_; }
  double nu() const { return nu_; }
  double alpha() const { return alpha_; }
  double sigma_min() const { return smin_; }
  double sigma_max() const { return smax_; }

  /// L z = w
  Vec solve(const Vec& w) const;
  /// L^T p = f
  Vec solve_transpose(const Vec& f) const;

 private:
  void require_regular() const;
  Mat L_;
  Vec eta_;
  double nu_ = 1, alpha_ = 0;
  double smin_ = 0, smax_ = 0;
  Eigen::PartialPivLU<Mat> lu_;
};

LinearizedOperator assemble_linearized(const ReducedSystem& sys, const Vec& eta, double nu, double alpha);

struct LinearizedSolution {
  Vec z;
  double residual = 0;   ///< |L z - w| / |w|
  double ratio_h1 = 0;   ///< nu |Dz| / |w|
  double ratio_v2 = 0;   ///< |sigma(z)| / ((1 + alpha)|Dz| + alpha |w| / nu)
};

LinearizedSolution solve_linearized(const ReducedSystem& sys, const LinearizedOperator& L, const Vec& w);
Vec solve_adjoint(const LinearizedOperator& L, const Vec& f);

struct GateauxRow {
  double rho = 0;
  double dnorm_r = 0;          ///< |D r_rho|
  double cost_remainder = 0;   ///< |J(u + rho w) - J(u) - rho dJ| / rho
  bool solved = true;
};

struct GateauxReport {
  std::vector<GateauxRow> rows;
  double slope_r = 0;
  double slope_cost = 0;
  double dJ = 0;
  bool complete = true;
};

GateauxReport gateaux_check(const ReducedSystem& sys, const StateProblem& prob, const Vec& w,
                            const std::vector<double>& rhos, const CostSpec& cost_spec);

struct LipschitzReport {
  double ratio_h1 = 0;  ///< nu |D(y1 - y2)| / |u1 - u2|
  double ratio_v2 = 0;  ///< |sigma(y1 - y2)| over the right side of the H2 estimate without kappa
  double q1 = 0, q2 = 0;
};

LipschitzReport lipschitz_check(const ReducedSystem& sys, const StateProblem& prob, const Vec& u1,
                                const Vec& u2);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sgf
