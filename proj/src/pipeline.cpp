#include "sgf/pipeline.hpp"

#include "sgf/io.hpp"

namespace sgf {

Workbench prepare(const DomainSpec& domain, Index m, const std::string& cache_dir) {
  Workbench w;
  w.d = Discretization::build(domain);
  const std::uint64_t hash = w.d->mesh_hash();
  const std::string stem = cache_dir.empty() ? "" : cache_dir + "/";
  const std::string basis_path = stem + "basis-" + hex64(hash) + ".bin";
  const std::string tensor_path = stem + "tensor-" + hex64(hash) + ".bin";
  if (!cache_dir.empty()) ensure_directory(cache_dir);

  const EigenOptions eopts;
  if (!cache_dir.empty() && read_basis_cache(basis_path, hash, m, *w.d, w.basis)) {
    w.basis_from_cache = true;
  } else {
    w.basis = compute_eigenbasis(*w.d, m, eopts);
    if (!cache_dir.empty()) write_basis_cache(w.basis, basis_path, eopts.residual_tol);
  }
  if (!cache_dir.empty() && read_tensor_cache(tensor_path, hash, m, 6, w.sys)) {
    w.tensor_from_cache = true;
  } else {
    w.sys = assemble_cross_tensor(*w.d, w.basis);
    if (!cache_dir.empty()) write_tensor_cache(w.sys, tensor_path);
  }
  return w;
}

}  // namespace sgf
