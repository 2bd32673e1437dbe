#pragma once

#include "sgf/common.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sgf {

struct DomainSpec {
  enum class Kind { ellipse, external_mesh };

  Kind kind = Kind::ellipse;
  double a = 2.0;         ///< semi-axis along x1
  double b = 1.0;         ///< semi-axis along x2
  double h_target = 0.11; ///< target edge length
  std::string mesh_path;  ///< external_mesh only

  /// Throws ErrorKind::validation on degenerate input.
  void validate() const;
  bool axisymmetric() const { return kind == Kind::ellipse && a == b; }
};

/// Quadratic triangle mesh. Local node order is Gmsh type 9:
/// vertices 0,1,2 then edge midpoints (0,1), (1,2), (2,0).
struct Mesh {
  Eigen::Matrix2Xd nodes;
  std::vector<std::array<int, 6>> triangles;
  /// Closed counterclockwise loop of 3-node edges (start, end, mid); edge i ends
  /// where edge i+1 starts. Canonical start: smallest boundary vertex id.
  std::vector<std::array<int, 3>> boundary_edges;
  std::vector<char> on_boundary;  ///< per node
  std::vector<char> is_vertex;    ///< per node: triangle corner (carries pressure)

  Index num_nodes() const { return nodes.cols(); }
  Index num_triangles() const { return static_cast<Index>(triangles.size()); }
  Index num_vertices() const;
  Index num_boundary_nodes() const;

  /// Boundary nodes in loop order: start, mid, start, mid, ...
  std::vector<int> boundary_loop() const;

  /// Chord length of the longest vertex-to-vertex edge.
  double max_edge_length() const;
  /// Smallest Jacobian determinant over all triangles, sampled at vertices and
  /// degree-4 quadrature points of the quadratic map.
  double min_jacobian() const;

  std::uint64_t hash() const;
};

/// Concentric-ring triangulation of the unit disk, mapped affinely onto the
/// ellipse (x1/a)^2 + (x2/b)^2 = 1. Boundary nodes (vertices and edge
/// midpoints) sit exactly on the curve.
Mesh generate_ellipse_mesh(const DomainSpec& spec);

/// Reads the ASCII Gmsh 2.2 subset: element types 2, 9 (triangles) and 1, 8
/// (lines, ignored beyond parsing). Linear triangles are promoted by inserting
/// edge midpoints.
Mesh load_msh(const std::string& path);
Mesh parse_msh(const std::string& text, const std::string& source_name = "<string>");

/// Writes nodes, type 9 triangles and type 8 boundary lines.
void write_msh(const Mesh& mesh, const std::string& path);
std::string format_msh(const Mesh& mesh);

/// Derives boundary loop and flags from triangle topology and validates the
/// invariants (orientation, single closed loop). Used by both the generator and
/// the reader; `triangle_lines` names elements in error messages when given.
void finalize_mesh(Mesh& mesh, const std::vector<int>* triangle_lines = nullptr);

/// Mesh for a spec: generated ellipse or file.
Mesh make_mesh(const DomainSpec& spec);

}  // namespace sgf
