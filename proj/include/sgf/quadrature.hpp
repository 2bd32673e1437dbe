#pragma once

#include "sgf/common.hpp"

#include <vector>

namespace sgf {

/// Symmetric rule on the reference triangle {(xi, eta): xi, eta >= 0, xi + eta <= 1}.
/// Weights sum to the reference area 1/2.
struct TriangleRule {
  int degree = 0;
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
};

/// Dunavant rules of degree 4 (6 points), 6 (12 points) and 8 (16 points).
const TriangleRule& triangle_rule(int degree);

/// Gauss-Legendre rule on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

LineRule gauss_legendre_01(int n);

}  // namespace sgf
