#pragma once

#include "sgf/fe_space.hpp"

#include <vector>

namespace sgf {

/// One Gauss point on a boundary edge, with the basis of the adjacent triangle.
struct BoundaryQuadPoint {
  int edge = 0;    ///< index into Mesh::boundary_edges
  int tri = 0;
  double s = 0;    ///< position along the edge, 0 at its start node
  double w = 0;    ///< arclength weight
  Vec2 x;
  Vec2 normal;     ///< outward normal of the curved element edge
  P2Values n2;
  P2Grads dn2;
  P1Values n1;
};

/// Assembled finite-element operators. Unconstrained blocks act on full
/// velocity vectors (2 per node); the *c blocks act on slip-constrained
/// coefficients, X_c = T^T X T.
struct OperatorSet {
  SpMat M;      ///< (y, phi)
  SpMat K;      ///< 2 (Dy, Dphi)
  SpMat G;      ///< (grad y, grad phi)
  SpMat B;      ///< (phi, grad q); equals -(div phi, q) on tangent fields
  SpMat Mp;     ///< pressure mass
  Vec pmean;    ///< (q, 1)
  SpMat Ms;     ///< quadratic scalar mass
  SpMat Ss;     ///< quadratic scalar stiffness
  SpMat Dcurl;  ///< (curl phi, s) for scalar test functions s
  double area = 0;
  std::vector<BoundaryQuadPoint> boundary;

  bool constrained = false;
  SpMat Mc, Kc, Gc, Bc;
};

OperatorSet assemble_operators(const FeSpace& space);

/// Fills the constrained blocks. Tangential stress stays natural: no boundary
/// term is added.
OperatorSet apply_slip_constraints(OperatorSet ops, const FeSpace& space);

/// Symmetric part, exactly symmetric in floating point.
SpMat symmetrized(const SpMat& a);

}  // namespace sgf
