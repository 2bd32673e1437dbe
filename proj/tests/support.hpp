#pragma once

#include "sgf/discretization.hpp"

#include <map>
#include <random>
#include <tuple>

namespace sgf::test {

inline DomainSpec ellipse(double a, double b, double h) {
  DomainSpec s;
  s.a = a;
  s.b = b;
  s.h_target = h;
  return s;
}

/// Discretizations are expensive; tests share them per (a, b, h).
inline DiscretizationPtr disc(double a, double b, double h) {
  static std::map<std::tuple<double, double, double>, DiscretizationPtr> cache;
  auto& slot = cache[{a, b, h}];
  if (!slot) slot = Discretization::build(ellipse(a, b, h));
  return slot;
}

inline Vec random_vec(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

/// Least-squares slope of log(err) against log(h).
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace sgf::test
