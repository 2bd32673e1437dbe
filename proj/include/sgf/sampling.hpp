#pragma once

#include "sgf/eigenbasis.hpp"

#include <vector>

namespace sgf {

/// Modal fields evaluated once at every point of a quadrature rule.
struct ModalSamples {
  int degree = 0;
  Vec w;                                   ///< quadrature weights (with Jacobian)
  Eigen::Matrix2Xd x;                      ///< point coordinates
  std::vector<VectorSamples> e;            ///< e_j values and gradients
  std::vector<Eigen::Matrix2Xd> grad_pi;   ///< grad pi_j
  Mat curl;                                ///< points x modes, elementwise curl e_j

  Index points() const { return w.size(); }
  Index modes() const { return static_cast<Index>(e.size()); }

  /// sum_j c_j e_j
  VectorSamples combine(const Vec& c) const;
  /// sigma(sum_j c_j e_j) = sum_j c_j ((1 + alpha lambda_j) e_j - alpha grad pi_j),
  /// values only.
  Eigen::Matrix2Xd sigma(const Vec& c, const Vec& lambda, double alpha) const;
};

ModalSamples sample_modes(const Discretization& d, const ModalBasis& b, int degree);

/// int (phi . grad z) . y over sampled fields.
double trilinear(const Vec& w, const VectorSamples& phi, const VectorSamples& z,
                 const Eigen::Matrix2Xd& y);

}  // namespace sgf
