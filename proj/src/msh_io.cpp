#include "sgf/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace sgf {

namespace {

[[noreturn]] void parse_fail(const std::string& src, int line, const std::string& msg) {
  throw Error(ErrorKind::parse, src + ":" + std::to_string(line) + ": " + msg);
}

struct LineReader {
  std::istringstream in;
  std::string source;
  int line = 0;

  bool next(std::string& s) {
    while (std::getline(in, s)) {
      ++line;
      if (!s.empty() && s.back() == '\r') s.pop_back();
      if (s.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }
  std::string require(const char* what) {
    std::string s;
    if (!next(s)) parse_fail(source, line, std::string("unexpected end of file, expected ") + what);
    return s;
  }
};

}  // namespace

Mesh parse_msh(const std::string& text, const std::string& source_name) {
  LineReader r{std::istringstream(text), source_name, 0};
  bool have_format = false, have_nodes = false, have_elements = false;

  std::vector<Vec2> pts;
  std::unordered_map<long, int> node_index;
  struct RawTri {
    std::vector<long> ids;
    int line;
  };
  std::vector<RawTri> raw;

  std::string s;
  while (r.next(s)) {
    if (s == "$MeshFormat") {
      std::istringstream ls(r.require("format line"));
      double version = 0;
      int file_type = -1, data_size = 0;
      ls >> version >> file_type >> data_size;
      if (!ls || version < 2.0 || version >= 3.0 || file_type != 0)
        parse_fail(r.source, r.line, "only ASCII MSH 2.x is supported");
      if (r.require("$EndMeshFormat") != "$EndMeshFormat")
        parse_fail(r.source, r.line, "expected $EndMeshFormat");
      have_format = true;
    } else if (s == "$Nodes") {
      long count = 0;
      {
        std::istringstream ls(r.require("node count"));
        if (!(ls >> count) || count < 0) parse_fail(r.source, r.line, "bad node count");
      }
      for (long k = 0; k < count; ++k) {
        std::istringstream ls(r.require("node"));
        long id;
        double x, y, z;
        if (!(ls >> id >> x >> y >> z)) parse_fail(r.source, r.line, "malformed node");
        if (!node_index.emplace(id, static_cast<int>(pts.size())).second)
          parse_fail(r.source, r.line, "duplicate node id " + std::to_string(id));
        pts.emplace_back(x, y);
      }
      if (r.require("$EndNodes") != "$EndNodes") parse_fail(r.source, r.line, "expected $EndNodes");
      have_nodes = true;
    } else if (s == "$Elements") {
      long count = 0;
      {
        std::istringstream ls(r.require("element count"));
        if (!(ls >> count) || count < 0) parse_fail(r.source, r.line, "bad element count");
      }
      for (long k = 0; k < count; ++k) {
        std::istringstream ls(r.require("element"));
        long id;
        int type, ntags;
        if (!(ls >> id >> type >> ntags)) parse_fail(r.source, r.line, "malformed element");
        for (int t = 0; t < ntags; ++t) {
          long tag;
          if (!(ls >> tag)) parse_fail(r.source, r.line, "malformed element tags");
        }
        int nn = 0;
        switch (type) {
          case 1: nn = 2; break;
          case 2: nn = 3; break;
          case 8: nn = 3; break;
          case 9: nn = 6; break;
          default:
            parse_fail(r.source, r.line,
                       "unsupported element type " + std::to_string(type) + " (element " +
                           std::to_string(id) + ")");
        }
        std::vector<long> ids(nn);
        for (int a = 0; a < nn; ++a)
          if (!(ls >> ids[a])) parse_fail(r.source, r.line, "element has too few nodes");
        if (type == 2 || type == 9) raw.push_back({std::move(ids), r.line});
      }
      if (r.require("$EndElements") != "$EndElements")
        parse_fail(r.source, r.line, "expected $EndElements");
      have_elements = true;
    } else if (!s.empty() && s[0] == '$') {
      // Unknown section: skip to its end marker.
      const std::string end = "$End" + s.substr(1);
      std::string t;
      do {
        if (!r.next(t)) parse_fail(r.source, r.line, "unterminated section " + s);
      } while (t != end);
    } else {
      parse_fail(r.source, r.line, "unexpected content outside sections");
    }
  }
  if (!have_format) parse_fail(r.source, r.line, "missing $MeshFormat");
  if (!have_nodes) parse_fail(r.source, r.line, "missing $Nodes");
  if (!have_elements) parse_fail(r.source, r.line, "missing $Elements");
  if (raw.empty()) parse_fail(r.source, r.line, "no triangles");

  // Keep only referenced nodes, in file order.
  std::vector<int> remap(pts.size(), -1);
  for (const auto& t : raw)
    for (long id : t.ids) {
      auto it = node_index.find(id);
      if (it == node_index.end())
        parse_fail(r.source, t.line, "unknown node id " + std::to_string(id));
      remap[it->second] = 0;
    }
  std::vector<Vec2> kept;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (remap[i] == 0) {
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(pts[i]);
    }

  Mesh m;
  std::vector<int> lines;
  std::map<std::pair<int, int>, int> mid;
  for (const auto& t : raw) {
    std::array<int, 6> tri{};
    for (std::size_t a = 0; a < t.ids.size(); ++a) tri[a] = remap[node_index.at(t.ids[a])];
    if (t.ids.size() == 3) {
      for (int k = 0; k < 3; ++k) {
        const int i = tri[k], j = tri[(k + 1) % 3];
        const auto key = std::make_pair(std::min(i, j), std::max(i, j));
        auto it = mid.find(key);
        if (it == mid.end()) {
          it = mid.emplace(key, static_cast<int>(kept.size())).first;
          kept.push_back(0.5 * (kept[i] + kept[j]));
        }
        tri[3 + k] = it->second;
      }
    }
    m.triangles.push_back(tri);
    lines.push_back(t.line);
  }
  m.nodes.resize(2, static_cast<Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) m.nodes.col(i) = kept[i];
  finalize_mesh(m, &lines);
  return m;
}

Mesh load_msh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot open mesh file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_msh(ss.str(), path);
}

std::string format_msh(const Mesh& mesh) {
  std::string out = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n";
  out += std::to_string(mesh.num_nodes()) + "\n";
  char buf[128];
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    std::snprintf(buf, sizeof buf, "%ld %.17g %.17g 0\n", static_cast<long>(i + 1),
                  mesh.nodes(0, i), mesh.nodes(1, i));
    out += buf;
  }
  out += "$EndNodes\n$Elements\n";
  out += std::to_string(mesh.boundary_edges.size() + mesh.triangles.size()) + "\n";
  long id = 1;
  for (const auto& e : mesh.boundary_edges) {
    std::snprintf(buf, sizeof buf, "%ld 8 2 1 1 %d %d %d\n", id++, e[0] + 1, e[1] + 1, e[2] + 1);
    out += buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "%ld 9 2 2 2 %d %d %d %d %d %d\n", id++, t[0] + 1, t[1] + 1,
                  t[2] + 1, t[3] + 1, t[4] + 1, t[5] + 1);
    out += buf;
  }
  out += "$EndElements\n";
  return out;
}

void write_msh(const Mesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot write mesh file " + path);
  f << format_msh(mesh);
  if (!f) throw Error(ErrorKind::io, "write failed for " + path);
}

}  // namespace sgf
