#include "sgf/saddle.hpp"

namespace sgf {

SaddleSolver::SaddleSolver(const SpMat& a, const SpMat& b, const Vec& pressure_mean)
    : n_(a.rows()), np_(b.rows()) {
  if (a.cols() != n_ || b.cols() != n_ || pressure_mean.size() != np_)
    throw Error(ErrorKind::assembly, "saddle system: inconsistent block sizes");
  const Index n = n_ + np_ + 1;
  std::vector<Triplet> trip;
  trip.reserve(a.nonZeros() + 2 * b.nonZeros() + 2 * np_);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < b.outerSize(); ++k)
    for (SpMat::InnerIterator it(b, k); it; ++it) {
      trip.emplace_back(n_ + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), n_ + it.row(), it.value());
    }
  const double scale = pressure_mean.norm();
  for (Index q = 0; q < np_; ++q) {
    trip.emplace_back(n_ + q, n - 1, pressure_mean(q) / scale);
    trip.emplace_back(n - 1, n_ + q, pressure_mean(q) / scale);
  }
  SpMat s(n, n);
  s.setFromTriplets(trip.begin(), trip.end());
  s.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(s);
  lu_->factorize(s);
  if (lu_->info() != Eigen::Success)
    throw Error(ErrorKind::solver, "saddle-point factorization failed: " + lu_->lastErrorMessage());
}

SaddleSolver::Solution SaddleSolver::solve(const Vec& f) const {
  return solve(f, Vec::Zero(np_));
}

SaddleSolver::Solution SaddleSolver::solve(const Vec& f, const Vec& g) const {
  Vec rhs = Vec::Zero(n_ + np_ + 1);
  rhs.head(n_) = f;
  rhs.segment(n_, np_) = g;
  Vec x = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorKind::solver, "saddle-point solve failed");
  return {x.head(n_), x.segment(n_, np_)};
}

}  // namespace sgf
