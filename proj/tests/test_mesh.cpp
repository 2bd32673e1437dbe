#include "support.hpp"

#include "sgf/boundary_frame.hpp"
#include "sgf/mesh.hpp"

#include <doctest.h>

#include <cmath>

using namespace sgf;

TEST_CASE("circle mesh boundary nodes lie on the curve") {
  const Mesh m = generate_ellipse_mesh(test::ellipse(1, 1, 0.5));
  for (Index i = 0; i < m.num_nodes(); ++i)
    if (m.on_boundary[i]) CHECK(std::abs(m.nodes.col(i).squaredNorm() - 1.0) <= 1e-12);
}

TEST_CASE("ellipse mesh invariants") {
  const auto spec = test::ellipse(2, 1, 0.2);
  const Mesh m = generate_ellipse_mesh(spec);
  CHECK(m.min_jacobian() > 0);
  CHECK(m.max_edge_length() <= 1.5 * 0.2);
  const auto& e = m.boundary_edges;
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i][1] == e[(i + 1) % e.size()][0]);
  // counterclockwise: positive signed area of the boundary polygon
  double area2 = 0;
  for (const auto& b : e) {
    const Vec2 p = m.nodes.col(b[0]), q = m.nodes.col(b[1]);
    area2 += p(0) * q(1) - p(1) * q(0);
  }
  CHECK(area2 > 0);
  for (Index i = 0; i < m.num_nodes(); ++i)
    if (m.on_boundary[i]) {
      const Vec2 x = m.nodes.col(i);
      CHECK(std::abs(x(0) * x(0) / 4 + x(1) * x(1) - 1.0) <= 1e-12);
    }
}

TEST_CASE("mesh generation is deterministic") {
  const auto spec = test::ellipse(2, 1, 0.3);
  const Mesh a = generate_ellipse_mesh(spec), b = generate_ellipse_mesh(spec);
  CHECK(a.hash() == b.hash());
  CHECK((a.nodes.array() == b.nodes.array()).all());
  CHECK(a.triangles == b.triangles);
}

TEST_CASE("boundary node count roughly doubles per halving") {
  std::vector<Index> counts;
  for (double h : {0.4, 0.2, 0.1})
    counts.push_back(generate_ellipse_mesh(test::ellipse(2, 1, h)).num_boundary_nodes());
  for (int i = 0; i < 2; ++i) {
    const double r = double(counts[i + 1]) / double(counts[i]);
    CHECK(r > 1.6);
    CHECK(r < 2.4);
  }
}

TEST_CASE("degenerate domain spec is rejected") {
  for (auto s : {test::ellipse(0, 1, 0.1), test::ellipse(1, -1, 0.1), test::ellipse(1, 1, 0)}) {
    try {
      generate_ellipse_mesh(s);
      FAIL("expected validation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::validation);
    }
  }
}

namespace {
const char* kSquare =
    "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
    "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"
    "$Elements\n2\n1 2 2 0 1 1 2 3\n2 2 2 0 1 1 3 4\n$EndElements\n";
}

TEST_CASE("two-triangle square mesh") {
  const Mesh m = parse_msh(kSquare);
  CHECK(m.num_triangles() == 2);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_nodes() == 9);
  CHECK(m.boundary_edges.size() == 4);
}

TEST_CASE("inverted triangle names the element") {
  std::string text = kSquare;
  text.replace(text.find("2 2 2 0 1 1 3 4"), 15, "2 2 2 0 1 1 4 3");
  try {
    parse_msh(text, "sq.msh");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("triangle 1") != std::string::npos);
    CHECK(std::string(e.what()).find("line 14") != std::string::npos);
  }
}

TEST_CASE("unsupported element type reports the line") {
  std::string text = kSquare;
  text.replace(text.find("2 2 2 0 1 1 3 4"), 15, "2 4 2 0 1 1 3 4");
  try {
    parse_msh(text, "sq.msh");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(std::string(e.what()).find("sq.msh:14") != std::string::npos);
  }
}

TEST_CASE("open boundary is rejected") {
  const char* text =
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n6\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 5 5 0\n5 6 5 0\n6 5 6 0\n$EndNodes\n"
      "$Elements\n2\n1 2 2 0 1 1 2 3\n2 2 2 0 1 4 5 6\n$EndElements\n";
  CHECK_THROWS_AS(parse_msh(text), Error);
}

TEST_CASE("gmsh round trip is exact") {
  const Mesh a = generate_ellipse_mesh(test::ellipse(2, 1, 0.3));
  const std::string text = format_msh(a);
  const Mesh b = parse_msh(text);
  CHECK((a.nodes.array() == b.nodes.array()).all());
  CHECK(a.triangles == b.triangles);
  CHECK(a.boundary_edges == b.boundary_edges);
  CHECK(format_msh(b) == text);
}

TEST_CASE("frame on the unit circle: g = 2 tau") {
  const auto spec = test::ellipse(1, 1, 0.3);
  const Mesh m = generate_ellipse_mesh(spec);
  const BoundaryFrame f = boundary_frame(m, spec);
  for (Index i = 0; i < f.size(); ++i) {
    CHECK((f.g.col(i) - 2.0 * f.tau.col(i)).norm() <= 1e-12);
    CHECK(std::abs(f.n.col(i).norm() - 1.0) <= 1e-14);
    CHECK(std::abs(f.n.col(i).dot(f.tau.col(i))) <= 1e-14);
  }
}

TEST_CASE("frame at the ellipse vertex (2, 0)") {
  const EllipseFrame e = ellipse_frame(2, 1, Vec2(2, 0));
  CHECK(e.n.isApprox(Vec2(1, 0)));
  CHECK(e.tau.isApprox(Vec2(0, 1)));
  // curvature a / b^2 at the end of the major axis
  CHECK(e.curvature == doctest::Approx(2.0));
}

TEST_CASE("polyline frame converges to the analytic one") {
  std::vector<double> hs{0.4, 0.2, 0.1}, err;
  for (double h : hs) {
    const auto spec = test::ellipse(2, 1, h);
    const Mesh m = generate_ellipse_mesh(spec);
    const BoundaryFrame exact = boundary_frame(m, spec);
    const BoundaryFrame fd = boundary_frame_polyline(m);
    CHECK(exact.analytic);
    CHECK_FALSE(fd.analytic);
    err.push_back((exact.g - fd.g).colwise().norm().maxCoeff());
  }
  CHECK(test::loglog_slope(hs, err) >= 1.0);
}

TEST_CASE("boundary loop shorter than 4 nodes is a geometry error") {
  Mesh m;
  m.nodes.resize(2, 3);
  m.nodes << 0, 1, 0, 0, 0, 1;
  CHECK_THROWS(boundary_frame_polyline(m));
}
