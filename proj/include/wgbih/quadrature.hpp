#pragma once

#include <vector>

#include "wgbih/mesh.hpp"

namespace wgbih {

/// Highest polynomial degree the rule constructors accept.
inline constexpr int kMaxExactness = 64;

struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  /// Edge rules only: parameter s in [-1, 1] of each point.
  std::vector<double> params;
  int exactness = 0;

  std::size_t size() const { return weights.size(); }
  double measure() const;
};

/// Gauss-Legendre nodes and weights on [-1, 1] (m points, exact to degree 2m-1).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int m);

/// Collapsed tensor Gauss rule on a triangle, exact for total degree `exactness`.
QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int exactness);

/// Composite rule over the cell's sub-triangulation.
QuadratureRule cell_quadrature(const PolyMesh& mesh, int cell, int exactness);

/// Gauss-Legendre mapped to the segment a -> b; s = -1 at a, +1 at b.
QuadratureRule segment_quadrature(const Point& a, const Point& b, int exactness);
QuadratureRule edge_quadrature(const PolyMesh& mesh, int edge, int exactness);

} // namespace wgbih
