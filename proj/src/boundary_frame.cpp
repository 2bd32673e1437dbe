#include "sgf/boundary_frame.hpp"

#include <cmath>

namespace sgf {

EllipseFrame ellipse_frame(double a, double b, const Vec2& x) {
  EllipseFrame f;
  const Vec2 grad(x(0) / (a * a), x(1) / (b * b));
  f.n = grad.normalized();
  f.tau = perp(f.n);
  // curvature of the implicit curve (x1/a)^2 + (x2/b)^2 = 1
  const double q = x(0) * x(0) / (a * a * a * a) + x(1) * x(1) / (b * b * b * b);
  f.curvature = 1.0 / (a * a * b * b * q * std::sqrt(q));
  f.g = 2.0 * f.curvature * f.tau;
  return f;
}

Vec2 BoundaryFrame::g_on_edge(const Mesh& mesh, Index edge, double s) const {
  const auto& e = mesh.boundary_edges[edge];
  const double n0 = (1 - s) * (1 - 2 * s), n1 = s * (2 * s - 1), nm = 4 * s * (1 - s);
  return n0 * g.col(slot[e[0]]) + n1 * g.col(slot[e[1]]) + nm * g.col(slot[e[2]]);
}

namespace {

BoundaryFrame empty_frame(const Mesh& mesh) {
  BoundaryFrame f;
  f.nodes = mesh.boundary_loop();
  if (f.nodes.size() < 4)
    throw Error(ErrorKind::geometry, "boundary loop has fewer than 4 nodes");
  f.slot.assign(mesh.num_nodes(), -1);
  for (std::size_t i = 0; i < f.nodes.size(); ++i) f.slot[f.nodes[i]] = static_cast<int>(i);
  const Index nb = f.size();
  f.n.resize(2, nb);
  f.tau.resize(2, nb);
  f.g.resize(2, nb);
  return f;
}

// Second-order derivative on a nonuniform cyclic sequence; spacing h[i] is the
// chord from node i-1 to node i.
Eigen::Matrix2Xd cyclic_derivative(const Eigen::Matrix2Xd& f, const std::vector<double>& h) {
  const Index n = f.cols();
  Eigen::Matrix2Xd d(2, n);
  for (Index i = 0; i < n; ++i) {
    const Index im = (i + n - 1) % n, ip = (i + 1) % n;
    const double h1 = h[i], h2 = h[ip];
    d.col(i) = -h2 / (h1 * (h1 + h2)) * f.col(im) + (h2 - h1) / (h1 * h2) * f.col(i) +
               h1 / (h2 * (h1 + h2)) * f.col(ip);
  }
  return d;
}

}  // namespace

BoundaryFrame boundary_frame_polyline(const Mesh& mesh) {
  BoundaryFrame f = empty_frame(mesh);
  const Index nb = f.size();
  Eigen::Matrix2Xd x(2, nb);
  for (Index i = 0; i < nb; ++i) x.col(i) = mesh.nodes.col(f.nodes[i]);
  std::vector<double> h(nb);
  for (Index i = 0; i < nb; ++i) h[i] = (x.col(i) - x.col((i + nb - 1) % nb)).norm();
  const Eigen::Matrix2Xd dx = cyclic_derivative(x, h);
  for (Index i = 0; i < nb; ++i) {
    f.tau.col(i) = dx.col(i).normalized();
    f.n.col(i) = Vec2(f.tau(1, i), -f.tau(0, i));
  }
  f.g = 2.0 * cyclic_derivative(f.n, h);
  f.analytic = false;
  return f;
}

BoundaryFrame boundary_frame(const Mesh& mesh, const DomainSpec& spec) {
  if (spec.kind != DomainSpec::Kind::ellipse) return boundary_frame_polyline(mesh);
  BoundaryFrame f = empty_frame(mesh);
  for (Index i = 0; i < f.size(); ++i) {
    const EllipseFrame e = ellipse_frame(spec.a, spec.b, mesh.nodes.col(f.nodes[i]));
    f.n.col(i) = e.n;
    f.tau.col(i) = e.tau;
    f.g.col(i) = e.g;
  }
  f.analytic = true;
  return f;
}

}  // namespace sgf
