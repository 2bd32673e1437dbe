#include "sgf/reduced.hpp"

#include "sgf/io.hpp"

#include <cmath>

namespace sgf {

Mat ReducedSystem::contract_first(const Vec& s) const {
  Mat y = Mat::Zero(m, m);
  for (Index i = 0; i < m; ++i)
    if (s(i) != 0.0) y += s(i) * C[i];
  return y;
}

Vec ReducedSystem::nonlinear(const Vec& s, const Vec& eta) const {
  return contract_first(s).transpose() * eta;
}

double ReducedSystem::pairing(const Vec& s, const Vec& eta, const Vec& phi) const {
  return eta.dot(contract_first(s) * phi);
}

double ReducedSystem::max_abs() const {
  double v = 0;
  for (const Mat& c : C) v = std::max(v, c.cwiseAbs().maxCoeff());
  return v;
}

ReducedSystem ReducedSystem::truncated(Index m_new) const {
  if (m_new > m || m_new < 1) throw Error(ErrorKind::validation, "cannot truncate tensor to " + std::to_string(m_new) + " modes");
  ReducedSystem r;
  r.m = m_new;
  r.lambda = lambda.head(m_new);
  for (Index i = 0; i < m_new; ++i) r.C.push_back(C[i].topLeftCorner(m_new, m_new));
  r.Gcurl = Gcurl.topLeftCorner(m_new, m_new);
  r.Ggrad = Ggrad.topLeftCorner(m_new, m_new);
  r.Gpi = Gpi.topLeftCorner(m_new, m_new);
  r.quad_degree = quad_degree;
  r.mesh_hash = mesh_hash;
  return r;
}

ReducedSystem assemble_cross_tensor(const ModalSamples& s, const ModalBasis& b) {
  const Index m = b.m, nq = s.points();
  ReducedSystem r;
  r.m = m;
  r.lambda = b.lambda;
  r.quad_degree = s.degree;
  r.mesh_hash = b.mesh_hash;

  // X(q, (j,k)) = w_q e_j^perp . e_k for j < k
  const Index npairs = m * (m - 1) / 2;
  Mat x(nq, npairs);
  Index col = 0;
  for (Index j = 0; j < m; ++j)
    for (Index k = j + 1; k < m; ++k, ++col)
      for (Index q = 0; q < nq; ++q) {
        const auto& ej = s.e[j].val;
        const auto& ek = s.e[k].val;
        x(q, col) = s.w(q) * (ej(0, q) * ek(1, q) - ej(1, q) * ek(0, q));
      }
  const Mat cij = s.curl.transpose() * x;  // m x npairs
  r.C.assign(m, Mat::Zero(m, m));
  for (Index i = 0; i < m; ++i) {
    col = 0;
    for (Index j = 0; j < m; ++j)
      for (Index k = j + 1; k < m; ++k, ++col) {
        r.C[i](j, k) = cij(i, col);
        r.C[i](k, j) = -cij(i, col);
      }
  }

  const Mat wc = s.w.asDiagonal() * s.curl;
  r.Gcurl = s.curl.transpose() * wc;
  r.Gcurl = 0.5 * (r.Gcurl + r.Gcurl.transpose()).eval();
  r.Ggrad.resize(m, m);
  r.Gpi.resize(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = i; j < m; ++j) {
      double g = 0, p = 0;
      for (Index q = 0; q < nq; ++q) {
        g += s.w(q) * (s.e[i].grad[q].array() * s.e[j].grad[q].array()).sum();
        p += s.w(q) * s.grad_pi[i].col(q).dot(s.grad_pi[j].col(q));
      }
      r.Ggrad(i, j) = r.Ggrad(j, i) = g;
      r.Gpi(i, j) = r.Gpi(j, i) = p;
    }
  return r;
}

ReducedSystem assemble_cross_tensor(const Discretization& d, const ModalBasis& b, int degree) {
  return assemble_cross_tensor(sample_modes(d, b, degree), b);
}

double trilinear_b(const Discretization& d, const Field& phi, const Field& z, const Field& y) {
  for (const Field* f : {&phi, &z, &y}) {
    check_field(d.space(), *f);
    if (f->kind != Field::Kind::velocity)
      throw Error(ErrorKind::validation, "trilinear_b: velocity fields required");
  }
  const QuadratureCache& qc = d.quad(8);
  const VectorSamples sp = sample_velocity(d.space(), qc, phi.coefficients);
  const VectorSamples sz = sample_velocity(d.space(), qc, z.coefficients);
  const VectorSamples sy = sample_velocity(d.space(), qc, y.coefficients);
  Vec w(qc.size());
  for (Index q = 0; q < qc.size(); ++q) w(q) = qc.points()[q].w;
  return trilinear(w, sp, sz, sy.val);
}

ControlMaps control_maps(const ReducedSystem& sys, Index m_c) {
  if (m_c < 1 || m_c > sys.m)
    throw Error(ErrorKind::validation, "m_c must satisfy 1 <= m_c <= m (got " + std::to_string(m_c) + ")");
  ControlMaps c;
  c.m = sys.m;
  c.m_c = m_c;
  c.injection = Mat::Identity(sys.m, m_c);
  c.curl_gram = sys.Gcurl.topLeftCorner(m_c, m_c);
  return c;
}

double modal_dnorm(const ReducedSystem& sys, const Vec& c) {
  const Index n = c.size();
  return std::sqrt(0.5 * (sys.lambda.head(n).array() * c.array().square()).sum());
}

double modal_h1(const ReducedSystem& sys, const Vec& c) {
  const Index n = c.size();
  return std::sqrt(c.squaredNorm() + std::max(0.0, c.dot(sys.Ggrad.topLeftCorner(n, n) * c)));
}

double modal_curl_sigma(const ReducedSystem& sys, const Vec& c, double alpha) {
  const Index n = c.size();
  const Vec s = (c.array() * (1.0 + alpha * sys.lambda.head(n).array())).matrix();
  return std::sqrt(std::max(0.0, s.dot(sys.Gcurl.topLeftCorner(n, n) * s)));
}

double modal_sigma_l2(const ReducedSystem& sys, const Vec& c, double alpha) {
  // the cross term vanishes: (e_i, grad pi_j) = (B e_i) . pi_j = 0
  const Index n = c.size();
  const Vec s = (c.array() * (1.0 + alpha * sys.lambda.head(n).array())).matrix();
  return std::sqrt(s.squaredNorm() + alpha * alpha * std::max(0.0, c.dot(sys.Gpi.topLeftCorner(n, n) * c)));
}

void write_tensor_cache(const ReducedSystem& sys, const std::string& path) {
  Json h;
  h["format"] = "sgf-cross-tensor";
  h["version"] = 1;
  h["mesh_hash"] = hex64(sys.mesh_hash);
  h["m"] = sys.m;
  h["quad_degree"] = sys.quad_degree;
  h["payload"] = {"lambda", "C", "Gcurl", "Ggrad", "Gpi"};
  std::vector<const Mat*> parts;
  const Mat lam = sys.lambda;
  parts.push_back(&lam);
  for (const Mat& c : sys.C) parts.push_back(&c);
  parts.push_back(&sys.Gcurl);
  parts.push_back(&sys.Ggrad);
  parts.push_back(&sys.Gpi);
  write_blob(path, h, parts);
}

bool read_tensor_cache(const std::string& path, std::uint64_t mesh_hash, Index m, int degree,
                       ReducedSystem& out) {
  Blob blob;
  try {
    blob = read_blob(path);
  } catch (const Error&) {
    return false;
  }
  const Json& h = blob.header;
  if (h.value("format", "") != "sgf-cross-tensor" || h.value("version", 0) != 1) return false;
  if (h.value("mesh_hash", "") != hex64(mesh_hash) || h.value("quad_degree", 0) != degree) return false;
  const Index mm = h.value("m", Index(0));
  if (mm < m) return false;
  if (static_cast<Index>(blob.data.size()) != mm + mm * mm * mm + 3 * mm * mm) return false;
  ReducedSystem r;
  r.m = mm;
  r.quad_degree = degree;
  r.mesh_hash = mesh_hash;
  const double* p = blob.data.data();
  r.lambda = Eigen::Map<const Vec>(p, mm);
  p += mm;
  for (Index i = 0; i < mm; ++i, p += mm * mm) r.C.push_back(Eigen::Map<const Mat>(p, mm, mm));
  r.Gcurl = Eigen::Map<const Mat>(p, mm, mm);
  p += mm * mm;
  r.Ggrad = Eigen::Map<const Mat>(p, mm, mm);
  p += mm * mm;
  r.Gpi = Eigen::Map<const Mat>(p, mm, mm);
  out = mm == m ? std::move(r) : r.truncated(m);
  return true;
}

}  // namespace sgf
