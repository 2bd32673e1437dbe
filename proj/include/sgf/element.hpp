#pragma once

#include "sgf/common.hpp"
#include "sgf/mesh.hpp"

#include <Eigen/LU>

#include <array>

namespace sgf {

using P2Values = Eigen::Matrix<double, 6, 1>;
using P2Grads = Eigen::Matrix<double, 6, 2>;
using P1Values = Eigen::Matrix<double, 3, 1>;
using P1Grads = Eigen::Matrix<double, 3, 2>;

/// Quadratic Lagrange basis on the reference triangle (Gmsh type 9 order).
inline P2Values p2_values(const Vec2& xi) {
  const double l1 = 1.0 - xi(0) - xi(1), l2 = xi(0), l3 = xi(1);
  P2Values n;
  n << l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), l3 * (2 * l3 - 1), 4 * l1 * l2, 4 * l2 * l3,
      4 * l3 * l1;
  return n;
}

inline P2Grads p2_ref_grads(const Vec2& xi) {
  const double l1 = 1.0 - xi(0) - xi(1), l2 = xi(0), l3 = xi(1);
  P2Grads g;
  g << -(4 * l1 - 1), -(4 * l1 - 1),  //
      4 * l2 - 1, 0,                  //
      0, 4 * l3 - 1,                  //
      4 * (l1 - l2), -4 * l2,         //
      4 * l3, 4 * l2,                 //
      -4 * l3, 4 * (l1 - l3);
  return g;
}

/// Second reference derivatives of the quadratic basis (constant):
/// rows are (d2/dxi2, d2/dxideta, d2/deta2).
inline Eigen::Matrix<double, 6, 3> p2_ref_hessians() {
  Eigen::Matrix<double, 6, 3> h;
  h << 4, 4, 4,    //
      4, 0, 0,     //
      0, 0, 4,     //
      -8, -4, 0,   //
      0, 4, 0,     //
      0, -4, -8;
  return h;
}

inline P1Values p1_values(const Vec2& xi) {
  return P1Values(1.0 - xi(0) - xi(1), xi(0), xi(1));
}

inline P1Grads p1_ref_grads() {
  P1Grads g;
  g << -1, -1, 1, 0, 0, 1;
  return g;
}

/// Isoparametric quadratic map evaluated at one reference point.
struct ElementPoint {
  Vec2 x;          ///< physical position
  Mat2 jac;        ///< dx/dxi
  double det = 0;  ///< det(jac)
  P2Values n2;     ///< quadratic basis values
  P2Grads dn2;     ///< physical gradients of the quadratic basis
  P1Values n1;     ///< linear (pressure) basis values
  P1Grads dn1;     ///< physical gradients of the linear basis
};

inline Eigen::Matrix<double, 2, 6> element_coords(const Mesh& mesh, int tri) {
  Eigen::Matrix<double, 2, 6> X;
  const auto& t = mesh.triangles[tri];
  for (int a = 0; a < 6; ++a) X.col(a) = mesh.nodes.col(t[a]);
  return X;
}

inline ElementPoint eval_point(const Eigen::Matrix<double, 2, 6>& X, const Vec2& xi) {
  ElementPoint p;
  p.n2 = p2_values(xi);
  const P2Grads gref = p2_ref_grads(xi);
  p.x = X * p.n2;
  p.jac = X * gref;
  p.det = p.jac.determinant();
  const Mat2 inv_t = p.jac.inverse().transpose();
  p.dn2 = (inv_t * gref.transpose()).transpose();
  p.n1 = p1_values(xi);
  p.dn1 = (inv_t * p1_ref_grads().transpose()).transpose();
  return p;
}

}  // namespace sgf
