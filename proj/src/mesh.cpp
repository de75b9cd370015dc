#include "wgbih/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wgbih/errors.hpp"

namespace wgbih {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

// Closed-triangle containment with a relative tolerance.
bool in_triangle(const Point& x, const Point& a, const Point& b, const Point& c, double tol) {
  return orient(a, b, x) >= -tol && orient(b, c, x) >= -tol && orient(c, a, x) >= -tol;
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2,
                        double tol) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)))
    return true;
  auto on_segment = [tol](const Point& a, const Point& b, const Point& x, double d) {
    return std::abs(d) <= tol && x.x() >= std::min(a.x(), b.x()) - tol &&
           x.x() <= std::max(a.x(), b.x()) + tol && x.y() >= std::min(a.y(), b.y()) - tol &&
           x.y() <= std::max(a.y(), b.y()) + tol;
  };
  return on_segment(q1, q2, p1, d1) || on_segment(q1, q2, p2, d2) ||
         on_segment(p1, p2, q1, d3) || on_segment(p1, p2, q2, d4);
}

double max_extent(std::span<const Point> polygon) {
  double ext = 0.0;
  for (const auto& a : polygon)
    for (const auto& b : polygon) ext = std::max(ext, (a - b).norm());
  return ext;
}

void check_simple(std::span<const Point> polygon) {
  const int m = static_cast<int>(polygon.size());
  const double scale = max_extent(polygon);
  const double tol = 1e-12 * scale * scale;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((polygon[i] - polygon[j]).norm() <= 1e-12 * scale)
        throw SelfIntersectingPolygon("polygon has repeated vertex " + std::to_string(i) + "/" +
                                      std::to_string(j));
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == m - 1);
      if (adjacent) continue;
      if (segments_intersect(polygon[i], polygon[(i + 1) % m], polygon[j], polygon[(j + 1) % m],
                             tol))
        throw SelfIntersectingPolygon("polygon sides " + std::to_string(i) + " and " +
                                      std::to_string(j) + " intersect");
    }
  }
}

} // namespace

double signed_area(std::span<const Point> polygon) {
  double a = 0.0;
  const std::size_t m = polygon.size();
  for (std::size_t i = 0; i < m; ++i) a += cross(polygon[i], polygon[(i + 1) % m]);
  return 0.5 * a;
}

Point polygon_centroid(std::span<const Point> polygon) {
  const std::size_t m = polygon.size();
  Point c = Point::Zero();
  double a = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = cross(polygon[i], polygon[(i + 1) % m]);
    a += w;
    c += w * (polygon[i] + polygon[(i + 1) % m]);
  }
  return c / (3.0 * a);
}

bool point_in_polygon(const Point& x, std::span<const Point> polygon) {
  bool inside = false;
  const std::size_t m = polygon.size();
  for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
    const Point& a = polygon[i];
    const Point& b = polygon[j];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x.x() < xc) inside = !inside;
    }
  }
  return inside;
}

std::vector<double> interior_angles(std::span<const Point> polygon) {
  const std::size_t m = polygon.size();
  std::vector<double> angles(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Point& prev = polygon[(i + m - 1) % m];
    const Point& cur = polygon[i];
    const Point& next = polygon[(i + 1) % m];
    const Point a = prev - cur;
    const Point b = next - cur;
    // angle swept from b to a counter-clockwise is the interior angle of a CCW loop
    double ang = std::atan2(cross(b, a), b.dot(a));
    if (ang < 0) ang += 2 * std::numbers::pi;
    angles[i] = ang;
  }
  return angles;
}

SubTriangulation triangulate_polygon(std::span<const Point> polygon) {
  const int m = static_cast<int>(polygon.size());
  if (m < 3) throw SelfIntersectingPolygon("polygon needs at least 3 vertices");
  check_simple(polygon);
  if (signed_area(polygon) <= 0) throw MeshError("polygon is not counter-clockwise");

  const double scale = max_extent(polygon);
  const double tol = 1e-14 * scale * scale;
  std::vector<int> remaining(m);
  for (int i = 0; i < m; ++i) remaining[i] = i;

  SubTriangulation out;
  while (remaining.size() > 3) {
    const int r = static_cast<int>(remaining.size());
    bool clipped = false;
    for (int i = 0; i < r && !clipped; ++i) {
      const int ia = remaining[(i + r - 1) % r];
      const int ib = remaining[i];
      const int ic = remaining[(i + 1) % r];
      const Point& a = polygon[ia];
      const Point& b = polygon[ib];
      const Point& c = polygon[ic];
      if (orient(a, b, c) <= tol) continue;
      bool ear = true;
      for (int j : remaining) {
        if (j == ia || j == ib || j == ic) continue;
        if (in_triangle(polygon[j], a, b, c, tol)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      out.triangles.push_back({ia, ib, ic});
      remaining.erase(remaining.begin() + i);
      clipped = true;
    }
    if (!clipped) throw SelfIntersectingPolygon("ear clipping cannot progress");
  }
  if (orient(polygon[remaining[0]], polygon[remaining[1]], polygon[remaining[2]]) <= tol)
    throw SelfIntersectingPolygon("degenerate final triangle");
  out.triangles.push_back({remaining[0], remaining[1], remaining[2]});
  return out;
}

PolyMesh::PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> loops,
                   MeshOptions options)
    : vertices_(std::move(vertices)) {
  for (const auto& v : vertices_)
    if (!std::isfinite(v.x()) || !std::isfinite(v.y())) throw MeshError("non-finite vertex");

  std::map<std::pair<int, int>, int> edge_of;
  cells_.resize(loops.size());
  for (std::size_t c = 0; c < loops.size(); ++c) {
    Cell& cell = cells_[c];
    cell.vertices = std::move(loops[c]);
    const int m = static_cast<int>(cell.vertices.size());
    if (m < 3) throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
    for (int v : cell.vertices)
      if (v < 0 || v >= num_vertices())
        throw MeshError("cell " + std::to_string(c) + " references vertex " + std::to_string(v));

    const std::vector<Point> poly = cell_polygon(static_cast<int>(c));
    cell.area = signed_area(poly);
    if (cell.area <= 0) throw MeshError("cell " + std::to_string(c) + " is not counter-clockwise");
    cell.triangulation = triangulate_polygon(poly);
    cell.centroid = polygon_centroid(poly);
    cell.diameter = max_extent(poly);
    cell.bbox_min = cell.bbox_max = poly[0];
    for (const auto& x : poly) {
      cell.bbox_min = cell.bbox_min.cwiseMin(x);
      cell.bbox_max = cell.bbox_max.cwiseMax(x);
    }

    double best = -1.0;
    for (const auto& t : cell.triangulation.triangles) {
      const double a = orient(poly[t[0]], poly[t[1]], poly[t[2]]);
      if (a > best) {
        best = a;
        cell.interior_point = (poly[t[0]] + poly[t[1]] + poly[t[2]]) / 3.0;
      }
    }

    if (cell.area / (cell.diameter * cell.diameter) < options.min_shape_ratio)
      throw MeshError("cell " + std::to_string(c) + " violates the shape-regularity bound");

    for (int i = 0; i < m; ++i) {
      const int a = cell.vertices[i];
      const int b = cell.vertices[(i + 1) % m];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find({key.first, key.second});
      if (it == edge_of.end()) {
        Edge e;
        e.vertices = {a, b};
        const Point t = vertices_[b] - vertices_[a];
        e.length = t.norm();
        e.normal = Point(t.y(), -t.x()) / e.length;
        e.midpoint = 0.5 * (vertices_[a] + vertices_[b]);
        e.cells = {static_cast<int>(c), -1};
        edge_of.emplace(std::pair{key.first, key.second}, num_edges());
        cell.edges.push_back({num_edges(), 1});
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.cells[1] >= 0)
          throw MeshError("edge " + std::to_string(a) + "-" + std::to_string(b) +
                          " shared by more than two cells");
        if (e.vertices[0] != b || e.vertices[1] != a)
          throw MeshError("edge " + std::to_string(a) + "-" + std::to_string(b) +
                          " traversed in the same direction by two cells");
        e.cells[1] = static_cast<int>(c);
        cell.edges.push_back({it->second, -1});
      }
    }
    h_ = std::max(h_, cell.diameter);
  }

  for (int e = 0; e < num_edges(); ++e)
    if (edges_[e].on_boundary()) boundary_edges_.push_back(e);

  // Outward-normal check: stepping inward from each edge midpoint must land
  // inside the cell, for convex and non-convex cells alike.
  for (int c = 0; c < num_cells(); ++c) {
    const std::vector<Point> poly = cell_polygon(c);
    for (const auto& inc : cells_[c].edges) {
      const Edge& e = edges_[inc.edge];
      const Point probe = e.midpoint - 1e-6 * e.length * inc.sign * e.normal;
      if (!point_in_polygon(probe, poly))
        throw MeshError("edge normal orientation check failed in cell " + std::to_string(c));
    }
  }
}

int PolyMesh::edge_sign(int cell, int edge) const {
  if (cell < 0 || cell >= num_cells()) throw EdgeNotIncident("no such cell");
  for (const auto& inc : cells_[cell].edges)
    if (inc.edge == edge) return inc.sign;
  throw EdgeNotIncident("edge " + std::to_string(edge) + " is not incident to cell " +
                        std::to_string(cell));
}

std::vector<Point> PolyMesh::cell_polygon(int cell) const {
  std::vector<Point> poly;
  poly.reserve(cells_[cell].vertices.size());
  for (int v : cells_[cell].vertices) poly.push_back(vertices_[v]);
  return poly;
}

std::vector<std::vector<int>> PolyMesh::loops() const {
  std::vector<std::vector<int>> out;
  out.reserve(cells_.size());
  for (const auto& c : cells_) out.push_back(c.vertices);
  return out;
}

PolyMesh generate_square_mesh(int n, Rect domain) {
  if (n < 1) throw MeshError("n must be positive");
  const double dx = (domain.x1 - domain.x0) / n;
  const double dy = (domain.y1 - domain.y0) / n;
  std::vector<Point> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts.emplace_back(domain.x0 + i * dx, domain.y0 + j * dy);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> loops;
  loops.reserve(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      loops.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return PolyMesh(std::move(verts), std::move(loops));
}

PolyMesh generate_nonconvex_mesh(int n, Rect domain) {
  if (n < 1) throw MeshError("n must be positive");
  const double dx = (domain.x1 - domain.x0) / n;
  const double dy = (domain.y1 - domain.y0) / n;
  const int ngrid = (n + 1) * (n + 1);
  std::vector<Point> verts;
  verts.reserve(ngrid + 2 * n * n);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts.emplace_back(domain.x0 + i * dx, domain.y0 + j * dy);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> loops;
  loops.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double xm = domain.x0 + (i + 0.5) * dx;
      const double ym = domain.y0 + (j + 0.5) * dy;
      const int p1 = static_cast<int>(verts.size());
      verts.emplace_back(xm, ym - kChevronOffset * dy);
      const int p2 = static_cast<int>(verts.size());
      verts.emplace_back(xm, ym + kChevronOffset * dy);
      const int sw = id(i, j), se = id(i + 1, j), ne = id(i + 1, j + 1), nw = id(i, j + 1);
      // polyline sw -> p1 -> p2 -> ne; reflex at p2 above it, at p1 below it
      loops.push_back({sw, se, ne, p2, p1});
      loops.push_back({sw, p1, p2, ne, nw});
    }
  }
  return PolyMesh(std::move(verts), std::move(loops));
}

PolyMesh read_mesh(std::istream& in) {
  int nv = 0, nc = 0;
  if (!(in >> nv >> nc) || nv < 3 || nc < 1) throw MeshError("mesh header must be 'NV NC'");
  std::vector<Point> verts(nv);
  for (int i = 0; i < nv; ++i) {
    double x = 0, y = 0;
    if (!(in >> x >> y)) throw MeshError("bad vertex line " + std::to_string(i + 2));
    verts[i] = Point(x, y);
  }
  std::vector<std::vector<int>> loops(nc);
  for (int c = 0; c < nc; ++c) {
    int m = 0;
    if (!(in >> m) || m < 3) throw MeshError("bad cell line " + std::to_string(nv + c + 2));
    loops[c].resize(m);
    for (int& v : loops[c])
      if (!(in >> v)) throw MeshError("bad cell line " + std::to_string(nv + c + 2));
  }
  return PolyMesh(std::move(verts), std::move(loops));
}

PolyMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const PolyMesh& mesh) {
  out << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
  out.precision(17);
  for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
  for (const auto& c : mesh.cells()) {
    out << c.vertices.size();
    for (int v : c.vertices) out << ' ' << v;
    out << '\n';
  }
}

PolyMesh permute_cells(const PolyMesh& mesh, std::span<const int> order) {
  auto loops = mesh.loops();
  std::vector<std::vector<int>> permuted;
  permuted.reserve(order.size());
  for (int c : order) permuted.push_back(loops.at(c));
  return PolyMesh(mesh.vertices(), std::move(permuted));
}

PolyMesh scaled(const PolyMesh& mesh, double factor) {
  std::vector<Point> verts = mesh.vertices();
  for (auto& v : verts) v *= factor;
  return PolyMesh(std::move(verts), mesh.loops());
}

} // namespace wgbih
