#include "sgf/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <iomanip>

namespace sgf {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

namespace {

void add3(TriangleRule& r, double w, double a) {
  const double b = 1.0 - 2.0 * a;
  for (const Vec2& p : {Vec2(a, a), Vec2(b, a), Vec2(a, b)}) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}

void add6(TriangleRule& r, double w, double a, double b) {
  const double c = 1.0 - a - b;
  for (const Vec2& p : {Vec2(a, b), Vec2(b, a), Vec2(a, c), Vec2(c, a), Vec2(b, c),
                        Vec2(c, b)}) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}

TriangleRule make_rule(int degree) {
  TriangleRule r;
  r.degree = degree;
  switch (degree) {
    case 4:
      add3(r, 0.2233815896780114659440, 0.4459484909159648863180);
      add3(r, 0.1099517436553218673890, 0.0915762135097707434600);
      break;
    case 6:
      add3(r, 0.1167862757263793660253, 0.2492867451709104212916);
      add3(r, 0.05084490637020681692094, 0.06308901449150222834033);
      add6(r, 0.08285107561837357519355, 0.05314504984481694735325,
           0.3103524510337844054166);
      break;
    case 8:
      r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      r.weights.push_back(0.5 * 0.1443156076777871682511);
      add3(r, 0.0950916342672846247939, 0.4592925882927231560288);
      add3(r, 0.1032173705347182502818, 0.1705693077517602066223);
      add3(r, 0.03245849762319808031093, 0.05054722831703097545842);
      add6(r, 0.02723031417443499426484, 0.008394777409957605337214,
           0.2631128296346381134218);
      break;
    default:
      throw Error(ErrorKind::validation,
                  "no triangle rule of degree " + std::to_string(degree));
  }
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const TriangleRule r4 = make_rule(4);
  static const TriangleRule r6 = make_rule(6);
  static const TriangleRule r8 = make_rule(8);
  switch (degree) {
    case 4: return r4;
    case 6: return r6;
    case 8: return r8;
  }
  throw Error(ErrorKind::validation, "no triangle rule of degree " + std::to_string(degree));
}

LineRule gauss_legendre_01(int n) {
  LineRule r;
  r.points.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.points[i] = 0.5 * (1.0 - x);
    r.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace sgf
