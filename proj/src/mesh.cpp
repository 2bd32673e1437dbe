#include "sgf/mesh.hpp"

#include "sgf/element.hpp"
#include "sgf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace sgf {

void DomainSpec::validate() const {
  if (kind == Kind::external_mesh) {
    if (mesh_path.empty())
      throw Error(ErrorKind::validation, "domain.mesh: external mesh requires a path");
    return;
  }
  if (!(a > 0.0)) throw Error(ErrorKind::validation, "domain.a: must be > 0");
  if (!(b > 0.0)) throw Error(ErrorKind::validation, "domain.b: must be > 0");
  if (!(h_target > 0.0)) throw Error(ErrorKind::validation, "domain.h: must be > 0");
}

Index Mesh::num_vertices() const {
  return std::count(is_vertex.begin(), is_vertex.end(), char(1));
}

Index Mesh::num_boundary_nodes() const {
  return std::count(on_boundary.begin(), on_boundary.end(), char(1));
}

std::vector<int> Mesh::boundary_loop() const {
  std::vector<int> loop;
  loop.reserve(2 * boundary_edges.size());
  for (const auto& e : boundary_edges) {
    loop.push_back(e[0]);
    loop.push_back(e[2]);
  }
  return loop;
}

double Mesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k)
      h = std::max(h, (nodes.col(t[k]) - nodes.col(t[(k + 1) % 3])).norm());
  return h;
}

double Mesh::min_jacobian() const {
  const TriangleRule& rule = triangle_rule(4);
  const std::array<Vec2, 3> corners{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  double jmin = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_triangles(); ++e) {
    const auto X = element_coords(*this, e);
    for (const Vec2& xi : corners) jmin = std::min(jmin, eval_point(X, xi).det);
    for (const Vec2& xi : rule.points) jmin = std::min(jmin, eval_point(X, xi).det);
  }
  return jmin;
}

std::uint64_t Mesh::hash() const {
  Fnv1a h;
  const Index n = nodes.cols();
  h.update(&n, sizeof n);
  h.update(nodes.data(), sizeof(double) * nodes.size());
  for (const auto& t : triangles) h.update(t.data(), sizeof(int) * 6);
  return h.digest();
}

namespace {

std::string element_label(int e, const std::vector<int>* lines) {
  std::string s = "triangle " + std::to_string(e);
  if (lines && e < static_cast<int>(lines->size()))
    s += " (line " + std::to_string((*lines)[e]) + ")";
  return s;
}

double signed_area(const Mesh& m, const std::array<int, 6>& t) {
  const Vec2 p0 = m.nodes.col(t[0]), p1 = m.nodes.col(t[1]), p2 = m.nodes.col(t[2]);
  return 0.5 * ((p1 - p0)(0) * (p2 - p0)(1) - (p1 - p0)(1) * (p2 - p0)(0));
}

}  // namespace

void finalize_mesh(Mesh& mesh, const std::vector<int>* triangle_lines) {
  const Index n = mesh.num_nodes();
  mesh.is_vertex.assign(n, 0);
  mesh.on_boundary.assign(n, 0);

  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    for (int a = 0; a < 6; ++a)
      if (t[a] < 0 || t[a] >= n)
        throw Error(ErrorKind::validation,
                    element_label(e, triangle_lines) + " references a missing node");
    if (!(signed_area(mesh, t) > 0.0))
      throw Error(ErrorKind::validation,
                  element_label(e, triangle_lines) + " is inverted or degenerate");
    for (int a = 0; a < 3; ++a) mesh.is_vertex[t[a]] = 1;
  }

  // Edges used by a single triangle, oriented as in that (counterclockwise) triangle.
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3];
      ++count[{std::min(i, j), std::max(i, j)}];
    }
  std::map<int, std::array<int, 3>> next;  // start vertex -> (start, end, mid)
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3];
      const int c = count[{std::min(i, j), std::max(i, j)}];
      if (c > 2)
        throw Error(ErrorKind::validation, "non-manifold edge between nodes " +
                                               std::to_string(i) + " and " + std::to_string(j));
      if (c == 1) {
        if (next.count(i))
          throw Error(ErrorKind::validation,
                      "boundary vertex " + std::to_string(i) + " is pinched");
        next[i] = {i, j, t[3 + k]};
      }
    }
  if (next.empty()) throw Error(ErrorKind::validation, "mesh has no boundary");

  mesh.boundary_edges.clear();
  const int start = next.begin()->first;
  int v = start;
  do {
    auto it = next.find(v);
    if (it == next.end())
      throw Error(ErrorKind::validation,
                  "open boundary loop at node " + std::to_string(v));
    mesh.boundary_edges.push_back(it->second);
    v = it->second[1];
    if (mesh.boundary_edges.size() > next.size())
      throw Error(ErrorKind::validation, "boundary loop does not close");
  } while (v != start);
  if (mesh.boundary_edges.size() != next.size())
    throw Error(ErrorKind::validation,
                "boundary consists of more than one loop (domain not simply connected)");

  for (const auto& e : mesh.boundary_edges)
    for (int a : e) mesh.on_boundary[a] = 1;

  // Every node must belong to some triangle.
  std::vector<char> used(n, 0);
  for (const auto& t : mesh.triangles)
    for (int a : t) used[a] = 1;
  for (Index i = 0; i < n; ++i)
    if (!used[i])
      throw Error(ErrorKind::validation, "node " + std::to_string(i) + " is unused");
}

Mesh generate_ellipse_mesh(const DomainSpec& spec) {
  spec.validate();
  if (spec.kind != DomainSpec::Kind::ellipse)
    throw Error(ErrorKind::validation, "generate_ellipse_mesh: domain kind is not ellipse");
  const double two_pi = 2.0 * std::numbers::pi;

  int rings = std::max(1, static_cast<int>(std::ceil(std::max(spec.a, spec.b) / spec.h_target)));
  for (;; ++rings) {
    Mesh m;
    std::vector<Vec2> pts;
    std::vector<std::vector<int>> ring_ids(rings + 1);
    pts.emplace_back(0.0, 0.0);
    ring_ids[0] = {0};
    for (int k = 1; k <= rings; ++k) {
      const int count = 6 * k;
      const double r = static_cast<double>(k) / rings;
      for (int i = 0; i < count; ++i) {
        const double t = two_pi * i / count;
        ring_ids[k].push_back(static_cast<int>(pts.size()));
        if (k == rings)
          pts.emplace_back(spec.a * std::cos(t), spec.b * std::sin(t));
        else
          pts.emplace_back(spec.a * r * std::cos(t), spec.b * r * std::sin(t));
      }
    }

    std::vector<std::array<int, 3>> tris;
    auto add = [&](int p, int q, int r) {
      const Vec2 a = pts[p], b = pts[q], c = pts[r];
      const double s = (b - a)(0) * (c - a)(1) - (b - a)(1) * (c - a)(0);
      if (s > 0) tris.push_back({p, q, r});
      else tris.push_back({p, r, q});
    };
    for (int k = 1; k <= rings; ++k) {
      const auto& in = ring_ids[k - 1];
      const auto& out = ring_ids[k];
      const int ni = static_cast<int>(in.size()), no = static_cast<int>(out.size());
      if (ni == 1) {
        for (int o = 0; o < no; ++o) add(in[0], out[o], out[(o + 1) % no]);
        continue;
      }
      int i = 0, o = 0;
      while (i < ni || o < no) {
        // Advance on the ring whose next node comes first in angle; compare
        // (o+1)/no against (i+1)/ni exactly.
        const bool outer = (i == ni) || (o < no && std::int64_t(o + 1) * ni <= std::int64_t(i + 1) * no);
        if (outer) {
          add(in[i % ni], out[o], out[(o + 1) % no]);
          ++o;
        } else {
          add(in[i], out[o % no], in[(i + 1) % ni]);
          ++i;
        }
      }
    }

    // Edge midpoints; boundary midpoints go to the curve at the mean parameter.
    const int nv = static_cast<int>(pts.size());
    const int nb = 6 * rings;
    const int first_boundary = nv - nb;
    std::map<std::pair<int, int>, int> mid;
    for (const auto& t : tris) {
      std::array<int, 6> tri{t[0], t[1], t[2], -1, -1, -1};
      for (int k = 0; k < 3; ++k) {
        const int i = t[k], j = t[(k + 1) % 3];
        const auto key = std::make_pair(std::min(i, j), std::max(i, j));
        auto it = mid.find(key);
        if (it == mid.end()) {
          Vec2 p = 0.5 * (pts[i] + pts[j]);
          if (i >= first_boundary && j >= first_boundary) {
            int oi = i - first_boundary, oj = j - first_boundary;
            if (oi > oj) std::swap(oi, oj);
            // adjacent around the ring; the wrap edge is (0, nb-1)
            const double s = (oj - oi == 1) ? oi + 0.5 : nb - 0.5;
            const double tm = two_pi * s / nb;
            p = Vec2(spec.a * std::cos(tm), spec.b * std::sin(tm));
          }
          it = mid.emplace(key, static_cast<int>(pts.size())).first;
          pts.push_back(p);
        }
        tri[3 + k] = it->second;
      }
      m.triangles.push_back(tri);
    }

    m.nodes.resize(2, static_cast<Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) m.nodes.col(i) = pts[i];
    finalize_mesh(m);
    if (m.max_edge_length() <= 1.5 * spec.h_target) return m;
  }
}

Mesh make_mesh(const DomainSpec& spec) {
  spec.validate();
  if (spec.kind == DomainSpec::Kind::external_mesh) return load_msh(spec.mesh_path);
  return generate_ellipse_mesh(spec);
}

}  // namespace sgf
