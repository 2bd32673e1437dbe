#pragma once

#include "sgf/common.hpp"

#include <string>

namespace sgf {

/// Measured domain constants.
struct ConstantsReport {
  double S2 = 0;        ///< |y|_0 <= S2 |grad y|_0
  double S4_lower = 0;  ///< sampled lower bound for |y|_L4 <= S4 |grad y|_0
  double C_K = 0;       ///< |grad y|_0 <= C_K |Dy|_0 on tangent fields
  double kappa1 = 0;    ///< S4^2 C_K^3, with the S4 lower bound
  double kappa2 = 0;    ///< S2 C_K / 2
  bool korn_reliable = true;
  double S2_modal = 0;  ///< S2 from the eigenbasis route
  std::uint64_t mesh_hash = 0;
  Index n_v = 0;
  Index m = 0;
};

}  // namespace sgf
