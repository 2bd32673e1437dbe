#pragma once

#include "sgf/common.hpp"
#include "sgf/mesh.hpp"

#include <vector>

namespace sgf {

/// Outward normal n, tangent tau = (-n2, n1) and g = 2 dn/ds at every boundary
/// node, stored in boundary-loop order.
struct BoundaryFrame {
  std::vector<int> nodes;  ///< boundary loop (start, mid, start, mid, ...)
  Eigen::Matrix2Xd n;
  Eigen::Matrix2Xd tau;
  Eigen::Matrix2Xd g;
  std::vector<int> slot;   ///< node id -> column, -1 for interior nodes
  bool analytic = false;

  Index size() const { return static_cast<Index>(nodes.size()); }
  /// g interpolated quadratically along boundary edge `edge` at s in [0, 1].
  Vec2 g_on_edge(const Mesh& mesh, Index edge, double s) const;
};

/// Ellipse: closed-form n, tau and curvature. External meshes: finite
/// differences along the boundary polyline.
BoundaryFrame boundary_frame(const Mesh& mesh, const DomainSpec& spec);

/// Polyline route regardless of domain kind (second-order nonuniform
/// differences of positions, then of the normal).
BoundaryFrame boundary_frame_polyline(const Mesh& mesh);

/// Analytic frame quantities of the ellipse at a point on (or near) the curve.
struct EllipseFrame {
  Vec2 n, tau, g;
  double curvature = 0;
};
EllipseFrame ellipse_frame(double a, double b, const Vec2& x);

}  // namespace sgf
