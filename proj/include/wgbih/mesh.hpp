#pragma once

// Two-dimensional polytopal meshes made of simple (possibly non-convex)
// polygons, with globally oriented edges.
//
// Orientation conventions:
//  - cell loops are counter-clockwise;
//  - every edge stores its endpoints in the loop order of the lowest-indexed
//    incident cell, and its unit normal n_e is the outward normal of that cell.
//    Hence n_e points from the lower- to the higher-indexed cell on interior
//    edges and out of the domain on boundary edges;
//  - a cell sees edge e with sign sigma = n_e . n, +1 for the owning cell and
//    -1 for the neighbour.

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wgbih {

using Point = Eigen::Vector2d;

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

struct Edge {
  std::array<int, 2> vertices{};
  Point normal = Point::Zero();   // n_e
  double length = 0.0;
  Point midpoint = Point::Zero();
  std::array<int, 2> cells{-1, -1}; // owner first; cells[1] == -1 on the boundary

  bool on_boundary() const { return cells[1] < 0; }
};

struct EdgeIncidence {
  int edge = -1;
  int sign = 1;
};

/// Triangles given as index triples into the polygon's vertex loop.
struct SubTriangulation {
  std::vector<std::array<int, 3>> triangles;
};

struct Cell {
  std::vector<int> vertices;          // CCW loop
  std::vector<EdgeIncidence> edges;   // edge i joins vertices[i] and vertices[i+1]
  double diameter = 0.0;              // h_T
  double area = 0.0;
  Point centroid = Point::Zero();
  Point interior_point = Point::Zero();
  Point bbox_min = Point::Zero();
  Point bbox_max = Point::Zero();
  SubTriangulation triangulation;

  int num_edges() const { return static_cast<int>(edges.size()); }
};

struct MeshOptions {
  /// Lower bound enforced on area / h_T^2 for every cell.
  double min_shape_ratio = 1e-3;
};

class PolyMesh {
public:
  /// Builds edges, normals and per-cell geometry from CCW vertex loops.
  /// Throws MeshError on inconsistent input and SelfIntersectingPolygon when
  /// a loop is not simple.
  PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> loops,
           MeshOptions options = {});

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }

  const Point& vertex(int i) const { return vertices_[i]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const Cell& cell(int c) const { return cells_[c]; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  /// Mesh size h = max h_T.
  double h() const { return h_; }

  /// sigma with sigma * n_e outward for `cell`. Throws EdgeNotIncident.
  int edge_sign(int cell, int edge) const;

  /// Polygon coordinates of a cell, in loop order.
  std::vector<Point> cell_polygon(int cell) const;

  /// Cell loops as given at construction.
  std::vector<std::vector<int>> loops() const;

private:
  std::vector<Point> vertices_;
  std::vector<Edge> edges_;
  std::vector<Cell> cells_;
  std::vector<int> boundary_edges_;
  double h_ = 0.0;
};

/// n x n axis-aligned squares on `domain`.
PolyMesh generate_square_mesh(int n, Rect domain = {});

/// Every square of an n x n grid split into two congruent non-convex
/// pentagons by a zig-zag polyline (corner, two interior points, opposite
/// corner). Each pentagon has exactly one reflex vertex.
PolyMesh generate_nonconvex_mesh(int n, Rect domain = {});

/// Offset of the two interior polyline points from the square centre, as a
/// fraction of the cell width.
inline constexpr double kChevronOffset = 0.25;

/// Ear clipping of a CCW simple polygon.
SubTriangulation triangulate_polygon(std::span<const Point> polygon);

double signed_area(std::span<const Point> polygon);
Point polygon_centroid(std::span<const Point> polygon);
bool point_in_polygon(const Point& x, std::span<const Point> polygon);
/// Interior angles in loop order (radians), for a CCW polygon.
std::vector<double> interior_angles(std::span<const Point> polygon);

/// Plain-text format: "NV NC", NV lines "x y", NC lines "m i1 ... im".
PolyMesh read_mesh(std::istream& in);
PolyMesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const PolyMesh& mesh);

/// Same cells listed in a different order: cell i of the result is
/// cell order[i] of `mesh`.
PolyMesh permute_cells(const PolyMesh& mesh, std::span<const int> order);

/// Uniformly scaled copy (all coordinates multiplied by `factor`).
PolyMesh scaled(const PolyMesh& mesh, double factor);

} // namespace wgbih
