#pragma once

#include "sgf/discretization.hpp"

#include <string>
#include <vector>

namespace sgf {

/// Smallest eigenpairs of A x = mu Mb x on the subspace {C x = 0}.
struct PencilResult {
  Vec mu;  ///< ascending
  Mat X;   ///< Mb-orthonormal columns
};

struct PencilOptions {
  enum class Route { automatic, lanczos, dense };
  Route route = Route::automatic;
  double shift = 0;          ///< must lie below the wanted spectrum
  Index dense_limit = 600;  ///< automatic: dense when the constrained size is at most this
  double tol = 1e-11;        ///< relative eigen-residual target
  double accept = 1e-8;      ///< residual still accepted when the Krylov budget runs out
  Index max_krylov = 120;
  std::uint64_t seed = 20240611;
};

/// C carries the pressure coupling; `pressure_mean` removes its constant
/// null vector.
PencilResult constrained_pencil(const SpMat& a, const SpMat& mb, const SpMat& c,
                                const Vec& pressure_mean, Index count,
                                const PencilOptions& opts = {});

/// Slip-Stokes eigenpairs K e + B^T pi = lambda M e, B e = 0.
struct ModalBasis {
  Index m = 0;
  Vec lambda;
  Mat E;      ///< full velocity coefficients, one column per mode
  Mat Ec;     ///< the same modes in constrained coordinates
  Mat Pi;     ///< pressure coefficients (zero mean)
  Mat curlE;  ///< L2 projection of curl e_j onto the quadratic scalar space
  std::uint64_t mesh_hash = 0;
  double max_residual = 0;  ///< max_j |K e - lambda M e + B^T pi| / (lambda |M e|)
};

struct EigenOptions {
  PencilOptions pencil;
  double residual_tol = 1e-8;
};

ModalBasis compute_eigenbasis(const Discretization& d, Index m, const EigenOptions& opts = {});

/// Modal velocity field sum_j c_j e_j.
inline Vec modal_field(const ModalBasis& b, const Vec& c) { return b.E.leftCols(c.size()) * c; }

/// Residuals of P sigma(e_j) = (1 + alpha lambda_j) e_j, relative to
/// 1 + alpha lambda_j.
struct PsigmaReport {
  double alpha = 0;
  /// grad pi_j carried as its L2 projection onto velocities: a discrete
  /// gradient, so the projector removes it up to roundoff.
  std::vector<double> projected;
  /// grad pi_j carried as its nodal average: a generic velocity field whose
  /// gradient part is only approximately removed.
  std::vector<double> nodal;
};

PsigmaReport verify_psigma_identity(const Discretization& d, const ModalBasis& b, double alpha);

/// Cache file: one JSON header line, then little-endian doubles E, Pi, curlE.
void write_basis_cache(const ModalBasis& b, const std::string& path, double tol);
/// Returns false if the file is missing or was built for another mesh.
bool read_basis_cache(const std::string& path, std::uint64_t mesh_hash, Index m,
                      const Discretization& d, ModalBasis& out);

}  // namespace sgf
