#include "wgbih/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include "wgbih/errors.hpp"

namespace wgbih {

namespace {

GaussLegendre compute_gauss_legendre(int m) {
  GaussLegendre g;
  g.nodes.resize(m);
  g.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= m; ++n) {
        const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= m; ++n) {
      const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    if (m == 1) p0 = 1.0;
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    g.nodes[m - 1 - i] = x;
    g.weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

void check_exactness(int exactness) {
  if (exactness < 0 || exactness > kMaxExactness)
    throw UnsupportedDegree("quadrature exactness " + std::to_string(exactness) +
                            " outside [0, " + std::to_string(kMaxExactness) + "]");
}

} // namespace

double QuadratureRule::measure() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

const GaussLegendre& gauss_legendre(int m) {
  constexpr int kMaxPoints = kMaxExactness / 2 + 2;
  if (m < 1 || m > kMaxPoints) throw UnsupportedDegree("Gauss-Legendre point count out of range");
  static std::array<GaussLegendre, kMaxPoints + 1> table;
  static std::array<std::once_flag, kMaxPoints + 1> flags;
  std::call_once(flags[m], [m] { table[m] = compute_gauss_legendre(m); });
  return table[m];
}

QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int exactness) {
  check_exactness(exactness);
  // Duffy collapse x = (1-u) a + u ((1-v) b + v c), Jacobian 2|T| u.
  const int m = exactness / 2 + 1;
  const auto& g = gauss_legendre(m);
  const double twice_area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  QuadratureRule rule;
  rule.exactness = exactness;
  rule.points.reserve(m * m);
  rule.weights.reserve(m * m);
  for (int i = 0; i < m; ++i) {
    const double u = 0.5 * (g.nodes[i] + 1.0);
    const double wu = 0.5 * g.weights[i];
    for (int j = 0; j < m; ++j) {
      const double v = 0.5 * (g.nodes[j] + 1.0);
      const double wv = 0.5 * g.weights[j];
      rule.points.push_back((1.0 - u) * a + u * ((1.0 - v) * b + v * c));
      rule.weights.push_back(wu * wv * u * std::abs(twice_area));
    }
  }
  return rule;
}

QuadratureRule cell_quadrature(const PolyMesh& mesh, int cell, int exactness) {
  check_exactness(exactness);
  const auto poly = mesh.cell_polygon(cell);
  QuadratureRule rule;
  rule.exactness = exactness;
  for (const auto& t : mesh.cell(cell).triangulation.triangles) {
    auto tri = triangle_quadrature(poly[t[0]], poly[t[1]], poly[t[2]], exactness);
    rule.points.insert(rule.points.end(), tri.points.begin(), tri.points.end());
    rule.weights.insert(rule.weights.end(), tri.weights.begin(), tri.weights.end());
  }
  return rule;
}

QuadratureRule segment_quadrature(const Point& a, const Point& b, int exactness) {
  check_exactness(exactness);
  const int m = exactness / 2 + 1;
  const auto& g = gauss_legendre(m);
  const double half = 0.5 * (b - a).norm();
  QuadratureRule rule;
  rule.exactness = 2 * m - 1;
  for (int i = 0; i < m; ++i) {
    const double s = g.nodes[i];
    rule.params.push_back(s);
    rule.points.push_back(0.5 * (1.0 - s) * a + 0.5 * (1.0 + s) * b);
    rule.weights.push_back(g.weights[i] * half);
  }
  return rule;
}

QuadratureRule edge_quadrature(const PolyMesh& mesh, int edge, int exactness) {
  const Edge& e = mesh.edge(edge);
  return segment_quadrature(mesh.vertex(e.vertices[0]), mesh.vertex(e.vertices[1]), exactness);
}

} // namespace wgbih
