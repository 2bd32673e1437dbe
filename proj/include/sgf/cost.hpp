#pragma once

#include "sgf/common.hpp"

namespace sgf {

/// J(u, y) = |y - y_d|^2 / 2 + lambda_reg |u|^2 / 2 in modal coordinates.
struct CostSpec {
  Vec d;                ///< target coefficients (length m)
  double offset = 0;    ///< |y_d - P_m y_d|^2 / 2
  double lambda_reg = 0;

  void validate(Index m) const {
    if (d.size() != m) throw Error(ErrorKind::validation, "target has " + std::to_string(d.size()) + " coefficients, expected " + std::to_string(m));
    if (!(lambda_reg >= 0)) throw Error(ErrorKind::validation, "lambda_reg must be >= 0");
    if (!(offset >= 0)) throw Error(ErrorKind::validation, "cost offset must be >= 0");
  }
};

inline double cost(const Vec& u, const Vec& eta, const CostSpec& c) {
  return 0.5 * (eta - c.d).squaredNorm() + c.offset + 0.5 * c.lambda_reg * u.squaredNorm();
}

}  // namespace sgf
