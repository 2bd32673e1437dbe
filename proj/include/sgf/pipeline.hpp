#pragma once

#include "sgf/reduced.hpp"

#include <string>

namespace sgf {

/// Discretization, eigenbasis and cross tensor for one domain and mode count.
struct Workbench {
  DiscretizationPtr d;
  ModalBasis basis;
  ReducedSystem sys;
  bool basis_from_cache = false;
  bool tensor_from_cache = false;
};

/// With a nonempty cache_dir the basis and tensor are read from
/// basis-<hash>.bin and tensor-<hash>.bin when they hold at least m modes,
/// and written back otherwise.
Workbench prepare(const DomainSpec& domain, Index m, const std::string& cache_dir = "");

}  // namespace sgf
