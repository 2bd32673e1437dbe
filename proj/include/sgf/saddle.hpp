#pragma once

#include "sgf/common.hpp"

#include <Eigen/SparseLU>

#include <memory>

namespace sgf {

/// Factorized saddle-point operator
///
///   [ A  B^T  0 ] [y]   [f]
///   [ B  0    m ] [p] = [g]
///   [ 0  m^T  0 ] [s]   [0]
///
/// where m is the pressure mean functional. Because constants lie in the
/// kernel of B^T the multiplier s vanishes for g = 0 and the pressure comes out
/// with zero mean.
class SaddleSolver {
 public:
  SaddleSolver(const SpMat& a, const SpMat& b, const Vec& pressure_mean);

  struct Solution {
    Vec y;
    Vec p;
  };
  Solution solve(const Vec& f) const;
  Solution solve(const Vec& f, const Vec& g) const;

  Index n_velocity() const { return n_; }
  Index n_pressure() const { return np_; }

 private:
  Index n_ = 0, np_ = 0;
  std::shared_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu_;
};

}  // namespace sgf
