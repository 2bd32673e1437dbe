#pragma once

#include "sgf/boundary_frame.hpp"
#include "sgf/common.hpp"
#include "sgf/element.hpp"
#include "sgf/mesh.hpp"

#include <memory>
#include <vector>

namespace sgf {

/// Rotation of one boundary velocity node into its (n, tau) frame: rows n^T, tau^T.
struct RotationRecord {
  int node = -1;
  Mat2 rotation = Mat2::Identity();
};

/// Taylor-Hood P2/P1 degrees of freedom on an isoparametric quadratic mesh.
///
/// Unconstrained velocity DOFs are interleaved, 2*node + component. The slip
/// constraint y.n = 0 is imposed by keeping only the tangential component at
/// boundary nodes: full = T * constrained, with T holding tau in the boundary
/// columns and unit columns elsewhere.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const BoundaryFrame> frame);

  const Mesh& mesh() const { return *mesh_; }
  const BoundaryFrame& frame() const { return *frame_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }

  Index n_v() const { return 2 * mesh_->num_nodes(); }
  Index n_p() const { return n_p_; }
  Index n_s() const { return mesh_->num_nodes(); }
  Index n_c() const { return t_.cols(); }

  int pressure_dof(int node) const { return pressure_dof_[node]; }
  const std::vector<int>& pressure_dofs() const { return pressure_dof_; }
  /// Index of the first constrained DOF of a node.
  int constrained_dof(int node) const { return constrained_dof_[node]; }
  const std::vector<RotationRecord>& rotations() const { return rotations_; }
  const SpMat& constraint() const { return t_; }

  Vec expand(const Vec& constrained) const { return t_ * constrained; }
  Vec restrict_load(const Vec& full_load) const { return t_.transpose() * full_load; }
  /// Constrained coordinates of a tangent field (T has orthonormal columns).
  Vec compress(const Vec& full) const { return t_.transpose() * full; }

  Vec2 node_value(const Vec& full, int node) const {
    return Vec2(full(2 * node), full(2 * node + 1));
  }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const BoundaryFrame> frame_;
  Index n_p_ = 0;
  std::vector<int> pressure_dof_;
  std::vector<int> constrained_dof_;
  std::vector<RotationRecord> rotations_;
  SpMat t_;
};

FeSpace build_spaces(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const BoundaryFrame> frame);

/// Discrete function on a FeSpace.
struct Field {
  enum class Kind { velocity, pressure, scalar };
  Kind kind = Kind::velocity;
  Vec coefficients;

  static Field velocity(Vec c) { return {Kind::velocity, std::move(c)}; }
  static Field pressure(Vec c) { return {Kind::pressure, std::move(c)}; }
  static Field scalar(Vec c) { return {Kind::scalar, std::move(c)}; }
};

/// Throws if the field length does not match its kind on `space`.
void check_field(const FeSpace& space, const Field& f);

/// Element geometry and basis data at every point of one triangle rule.
struct QuadPoint {
  int tri = 0;
  double w = 0;  ///< rule weight times Jacobian determinant
  Vec2 x;
  P2Values n2;
  P2Grads dn2;
  P1Values n1;
  P1Grads dn1;
};

class QuadratureCache {
 public:
  QuadratureCache(const Mesh& mesh, int degree);
  const std::vector<QuadPoint>& points() const { return points_; }
  int degree() const { return degree_; }
  Index size() const { return static_cast<Index>(points_.size()); }

 private:
  int degree_;
  std::vector<QuadPoint> points_;
};

/// Values and gradients (grad(a, b) = d v_a / d x_b) of a vector field at
/// quadrature points.
struct VectorSamples {
  Eigen::Matrix2Xd val;
  std::vector<Mat2> grad;

  Index size() const { return val.cols(); }
  double curl(Index q) const { return grad[q](1, 0) - grad[q](0, 1); }
  static VectorSamples zeros(Index n) {
    return {Eigen::Matrix2Xd::Zero(2, n), std::vector<Mat2>(n, Mat2::Zero())};
  }
  VectorSamples& axpy(double a, const VectorSamples& x);
};

struct ScalarSamples {
  Vec val;
  Eigen::Matrix2Xd grad;
};

VectorSamples sample_velocity(const FeSpace& space, const QuadratureCache& qc, const Vec& full);
/// Quadratic scalar field (one value per node).
ScalarSamples sample_scalar(const FeSpace& space, const QuadratureCache& qc, const Vec& coeffs);
/// Linear pressure field (one value per vertex).
ScalarSamples sample_pressure(const FeSpace& space, const QuadratureCache& qc, const Vec& coeffs);

}  // namespace sgf
