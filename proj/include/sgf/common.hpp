#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sgf {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Error classes map one-to-one onto CLI exit codes.
enum class ErrorKind : int {
  validation = 2,
  parse = 3,
  geometry = 4,
  assembly = 5,
  solver = 6,
  io = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::assembly: return "assembly";
    case ErrorKind::solver: return "solver";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// 2D perpendicular v^perp = (-v2, v1).
template <typename Derived>
inline Vec2 perp(const Eigen::MatrixBase<Derived>& v) {
  return Vec2(-v(1), v(0));
}

/// FNV-1a, used for mesh fingerprints.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t v);

}  // namespace sgf
