#pragma once

#include "sgf/sampling.hpp"

#include <string>
#include <vector>

namespace sgf {

/// Modal reduction of the second-grade pairings.
///
/// C_ijk = int curl e_i (e_j^perp . e_k), stored as slices C[i](j, k); it is
/// antisymmetric in (j, k) by construction. With s = w(alpha) o zeta,
/// (curl sigma(z) x y, phi) = sum_ijk s_i eta_j phi_k C_ijk.
struct ReducedSystem {
  Index m = 0;
  Vec lambda;
  std::vector<Mat> C;
  Mat Gcurl;  ///< (curl e_i, curl e_j)
  Mat Ggrad;  ///< (grad e_i, grad e_j)
  Mat Gpi;    ///< (grad pi_i, grad pi_j)
  int quad_degree = 6;
  std::uint64_t mesh_hash = 0;

  double c(Index i, Index j, Index k) const { return C[i](j, k); }
  Vec weights(double alpha) const { return (1.0 + alpha * lambda.array()).matrix(); }
  /// sum_i s_i C[i]
  Mat contract_first(const Vec& s) const;
  /// N_k = sum_ij s_i eta_j C_ijk
  Vec nonlinear(const Vec& s, const Vec& eta) const;
  /// sum_ijk s_i eta_j phi_k C_ijk
  double pairing(const Vec& s, const Vec& eta, const Vec& phi) const;
  double max_abs() const;
  /// Leading m' modes.
  ReducedSystem truncated(Index m_new) const;
};

ReducedSystem assemble_cross_tensor(const Discretization& d, const ModalBasis& b, int degree = 6);
ReducedSystem assemble_cross_tensor(const ModalSamples& s, const ModalBasis& b);

/// b(phi, z, y) = int (phi . grad z) . y by degree-8 quadrature.
double trilinear_b(const Discretization& d, const Field& phi, const Field& z, const Field& y);

/// Controls live on the first m_c modes.
struct ControlMaps {
  Index m = 0, m_c = 0;
  Mat injection;  ///< m x m_c
  Mat curl_gram;  ///< m_c x m_c block of Gcurl

  Vec inject(const Vec& u) const { return injection * u; }
  double l2(const Vec& u) const { return u.norm(); }
  double curl(const Vec& u) const { return std::sqrt(std::max(0.0, u.dot(curl_gram * u))); }
  double hcurl(const Vec& u) const { return std::sqrt(u.squaredNorm() + curl(u) * curl(u)); }
};

ControlMaps control_maps(const ReducedSystem& sys, Index m_c);

/// Norms of modal fields y = sum c_j e_j available in closed form.
double modal_dnorm(const ReducedSystem& sys, const Vec& c);      ///< |Dy|_0
double modal_h1(const ReducedSystem& sys, const Vec& c);         ///< (|y|^2 + |grad y|^2)^(1/2)
double modal_curl_sigma(const ReducedSystem& sys, const Vec& c, double alpha);
double modal_sigma_l2(const ReducedSystem& sys, const Vec& c, double alpha);

void write_tensor_cache(const ReducedSystem& sys, const std::string& path);
bool read_tensor_cache(const std::string& path, std::uint64_t mesh_hash, Index m, int degree,
                       ReducedSystem& out);

}  // namespace sgf
