#pragma once

#include "sgf/boundary_frame.hpp"
#include "sgf/fe_space.hpp"
#include "sgf/mesh.hpp"
#include "sgf/operators.hpp"
#include "sgf/saddle.hpp"

#include <memory>

namespace sgf {

/// Mesh, frame, spaces, constrained operators and quadrature caches for one
/// domain. Immutable once built; share it by shared_ptr.
class Discretization {
 public:
  static std::shared_ptr<const Discretization> build(const DomainSpec& spec);
  static std::shared_ptr<const Discretization> from_mesh(Mesh mesh, const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  const Mesh& mesh() const { return *mesh_; }
  const BoundaryFrame& frame() const { return *frame_; }
  const FeSpace& space() const { return *space_; }
  const OperatorSet& ops() const { return ops_; }
  std::uint64_t mesh_hash() const { return hash_; }

  /// Cached rules of degree 4, 6 and 8.
  const QuadratureCache& quad(int degree) const;
  /// Factorized [Mc Bc^T; Bc 0] used by the Helmholtz projection.
  const SaddleSolver& mass_saddle() const { return *mass_saddle_; }

 private:
  Discretization() = default;
  DomainSpec spec_;
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const BoundaryFrame> frame_;
  std::shared_ptr<const FeSpace> space_;
  OperatorSet ops_;
  std::uint64_t hash_ = 0;
  std::unique_ptr<QuadratureCache> q4_, q6_, q8_;
  std::unique_ptr<SaddleSolver> mass_saddle_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

struct StokesResult {
  Field velocity;
  Field pressure;
  double residual = 0;  ///< relative residual of the full saddle system
};

/// (gamma M + nu K) y + B^T pi = M f, B y = 0, mean(pi) = 0, y.n = 0.
StokesResult stokes_solve(const Discretization& d, const Field& f, double gamma, double nu = 1.0);

/// L2-orthogonal projection onto discretely divergence-free tangent fields.
Field helmholtz_project(const Discretization& d, const Field& v);
/// Projection of v + grad(q) with q a pressure-space function; the gradient
/// part is annihilated exactly.
Field helmholtz_project(const Discretization& d, const Field& v, const Vec& q);

struct Norms {
  double l2 = 0;
  double h1 = 0;          ///< (|v|_0^2 + |grad v|_0^2)^(1/2)
  double dsemi = 0;       ///< |Dv|_0 for velocities, |grad v|_0 for scalars
  double l4 = 0;
  double boundary_l2 = 0;
};

Norms norms(const Discretization& d, const Field& v);

/// (int_Gamma ((n . Dy) . tau)^2 ds)^(1/2) along the curved element edges: the
/// natural slip condition, satisfied only weakly.
double tangential_stress_residual(const Discretization& d, const Vec& y);

/// Interpolates a vector function at the velocity nodes.
template <typename F>
Vec interpolate_velocity(const Mesh& mesh, F&& f) {
  Vec v(2 * mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) v.segment<2>(2 * i) = f(Vec2(mesh.nodes.col(i)));
  return v;
}

template <typename F>
Vec interpolate_scalar(const Mesh& mesh, F&& f) {
  Vec v(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) v(i) = f(Vec2(mesh.nodes.col(i)));
  return v;
}

template <typename F>
Vec interpolate_pressure(const FeSpace& space, F&& f) {
  Vec v(space.n_p());
  const Mesh& mesh = space.mesh();
  for (Index i = 0; i < mesh.num_nodes(); ++i)
    if (space.pressure_dof(i) >= 0) v(space.pressure_dof(i)) = f(Vec2(mesh.nodes.col(i)));
  return v;
}

}  // namespace sgf
