#pragma once

#include "sgf/constants.hpp"
#include "sgf/reduced.hpp"

#include <vector>

namespace sgf {

struct ConstantsOptions {
  int s4_samples = 400;   ///< random search steps for the L4 ratio
  Index s4_modes = 8;
  std::uint64_t seed = 1;
};

/// S2 and C_K from constrained pencils on the discretely divergence-free
/// tangent space; S4 by sampling modal fields (a lower bound).
ConstantsReport measure_constants(const Discretization& d, const ModalBasis& b, const ReducedSystem& sys,
                                  const ConstantsOptions& opts = {});

struct CurlTraceReport {
  double max = 0;  ///< max over boundary nodes of |curl y - y . g|
  double rms = 0;
};

/// curl y at a boundary node is the average of the one-sided values from the
/// adjacent elements.
CurlTraceReport check_curl_trace(const Discretization& d, const Vec& full);

struct IdentitySample {
  double id1_lhs = 0, id1_rhs = 0;  ///< (curl sigma(y) x z, phi) and b(phi, z, sigma(y)) - b(z, phi, sigma(y))
  double id2_lhs = 0;               ///< (curl sigma(y x z), phi) after one integration by parts
  double id2_a = 0;                 ///< b(z, y, sigma(phi)) - b(y, z, sigma(phi))
  double id2_b = 0;                 ///< the eight-term expansion
  double self_lhs = 0, self_rhs = 0;  ///< identity 1 with z = phi = y
};

struct IdentityReport {
  double alpha = 0;
  std::vector<IdentitySample> samples;
  double mismatch1 = 0;   ///< max |lhs - rhs| / rms(lhs)
  double mismatch2a = 0;
  double mismatch2b = 0;
  double mismatch_ab = 0;
  double self_max = 0;    ///< max |self_rhs| / rms(id1 lhs)
};

/// Random triples from the first `modes` eigenfunctions; sigma through the
/// eigen-relation with the pressure gradients and second derivatives taken
/// from L2-projected first derivatives.
IdentityReport check_trilinear_identities(const Discretization& d, const ModalBasis& b, double alpha,
                                          int samples = 8, Index modes = 6, std::uint64_t seed = 3);

struct IdentityRefinement {
  std::vector<double> h;
  std::vector<IdentityReport> reports;
  double slope1 = 0, slope2a = 0, slope2b = 0, slope_ab = 0;
};

IdentityRefinement identity_refinement(const DomainSpec& base, const std::vector<double>& hs, double alpha,
                                       int samples = 8, Index modes = 6, std::uint64_t seed = 3);

struct Rm2Report {
  double alpha = 0;
  double safety = 2.25;        ///< (1.5)^2 on the sampled S4
  double max_ratio0 = 0;       ///< |(curl z x y, z)| / (safety kappa1 |Dy| |Dz|^2)
  bool holds0 = true;
  double max_ratio_alpha = 0;  ///< alpha > 0: over (kappa1 |Dy| + alpha |y|_H3-proxy) |Dz|^2
};

Rm2Report check_rm2_bound(const ReducedSystem& sys, const ConstantsReport& consts, double alpha, int samples = 50,
                          std::uint64_t seed = 5);

struct SigmaRow {
  double alpha = 0;
  double max_ratio = 0;       ///< |sigma(y) - P sigma(y)| / (alpha |grad y|)
  double min_ratio = 0;
  double projection_error = 0;  ///< field Helmholtz projection vs the eigen-relation
  double equiv_min = 0, equiv_max = 0;  ///< (|y|_H1^2 + |P sigma|^2)^(1/2) / (|y|_H1^2 + |sigma|^2)^(1/2)
};

std::vector<SigmaRow> check_sigma_psigma(const Discretization& d, const ModalBasis& b, const ReducedSystem& sys,
                                         const std::vector<double>& alphas, int samples = 20,
                                         std::uint64_t seed = 7);

}  // namespace sgf
