#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wgbih/errors.hpp"
#include "wgbih/mesh.hpp"

using namespace wgbih;

namespace {

double shoelace(const std::vector<Point>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * a;
}

double triangulated_area(const std::vector<Point>& poly, const SubTriangulation& t) {
  double sum = 0.0;
  for (const auto& tri : t.triangles) {
    const Point a = poly[tri[0]], b = poly[tri[1]], c = poly[tri[2]];
    const double area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    CHECK(area > 0.0);
    sum += area;
  }
  return sum;
}

void check_consistency(const PolyMesh& mesh) {
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    const Point d = mesh.vertex(edge.vertices[1]) - mesh.vertex(edge.vertices[0]);
    CHECK(std::abs(edge.normal.norm() - 1.0) < 1e-14);
    CHECK(std::abs(edge.normal.dot(d)) < 1e-14);
    CHECK(edge.length > 0.0);
    if (!edge.on_boundary())
      CHECK(mesh.edge_sign(edge.cells[0], e) == -mesh.edge_sign(edge.cells[1], e));
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto poly = mesh.cell_polygon(c);
    const Cell& cell = mesh.cell(c);
    CHECK(point_in_polygon(cell.interior_point, poly));
    CHECK(std::abs(triangulated_area(poly, cell.triangulation) - cell.area) <= 1e-12 * cell.area);
    double diam = 0.0;
    for (const auto& a : poly)
      for (const auto& b : poly) diam = std::max(diam, (a - b).norm());
    CHECK(cell.diameter == doctest::Approx(diam).epsilon(1e-15));
    for (const auto& inc : cell.edges) {
      // sigma * n_e must point out of the cell
      const Edge& edge = mesh.edge(inc.edge);
      const Point probe = edge.midpoint + 1e-6 * edge.length * inc.sign * edge.normal;
      CHECK_FALSE(point_in_polygon(probe, poly));
    }
  }
}

} // namespace

TEST_CASE("square mesh counts") {
  const auto m1 = generate_square_mesh(1);
  CHECK(m1.num_cells() == 1);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_edges() == 4);
  CHECK(m1.boundary_edges().size() == 4);

  const auto m2 = generate_square_mesh(2);
  CHECK(m2.num_cells() == 4);
  CHECK(m2.num_vertices() == 9);
  CHECK(m2.num_edges() == 12);
  CHECK(m2.boundary_edges().size() == 8);

  CHECK(generate_square_mesh(4).h() == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-15));
}

TEST_CASE("non-convex mesh cells have one reflex vertex") {
  const auto m = generate_nonconvex_mesh(1);
  REQUIRE(m.num_cells() == 2);
  for (int c = 0; c < 2; ++c) {
    CHECK(m.cell(c).num_edges() == 5);
    const auto angles = interior_angles(m.cell_polygon(c));
    int reflex = 0;
    double sum = 0.0;
    for (double a : angles) {
      reflex += a > std::numbers::pi;
      sum += a;
    }
    CHECK(reflex == 1);
    CHECK(sum == doctest::Approx(3 * std::numbers::pi));
  }
  const auto m2 = generate_nonconvex_mesh(2);
  CHECK(m2.num_cells() == 8);
  double area = 0.0;
  for (const auto& c : m2.cells()) area += c.area;
  CHECK(std::abs(area - 1.0) < 1e-12);
}

TEST_CASE("generated meshes are consistent") {
  for (int n : {1, 2, 3, 5}) {
    check_consistency(generate_square_mesh(n));
    check_consistency(generate_nonconvex_mesh(n));
  }
  check_consistency(generate_square_mesh(3, {-1.0, 2.0, 0.5, 4.0}));
}

TEST_CASE("refinement halves h") {
  for (int n : {1, 2, 4, 8}) {
    CHECK(std::abs(generate_square_mesh(2 * n).h() - generate_square_mesh(n).h() / 2) < 1e-14);
    CHECK(std::abs(generate_nonconvex_mesh(2 * n).h() - generate_nonconvex_mesh(n).h() / 2) <
          1e-14);
  }
}

TEST_CASE("non-convex family is self-similar") {
  const auto coarse = generate_nonconvex_mesh(2);
  const auto fine = generate_nonconvex_mesh(4);
  const double ratio = coarse.cell(0).area / (coarse.h() * coarse.h());
  for (const auto& c : fine.cells()) CHECK(c.area / (fine.h() * fine.h()) == doctest::Approx(ratio));
}

TEST_CASE("edge signs") {
  const auto m = generate_square_mesh(1);
  // bottom edge of the unit square
  for (int e = 0; e < m.num_edges(); ++e) {
    CHECK(m.edge_sign(0, e) == 1);
    if (std::abs(m.edge(e).midpoint.y()) < 1e-15) CHECK(m.edge(e).normal.y() == doctest::Approx(-1.0));
  }
  const auto m2 = generate_square_mesh(2);
  for (int e : m2.boundary_edges()) CHECK(m2.edge_sign(m2.edge(e).cells[0], e) == 1);
  // an edge of cell 3 that cell 0 does not touch
  int far = -1;
  for (const auto& inc : m2.cell(3).edges)
    if (m2.edge(inc.edge).on_boundary()) far = inc.edge;
  REQUIRE(far >= 0);
  CHECK_THROWS_AS(m2.edge_sign(0, far), EdgeNotIncident);
}

TEST_CASE("interior edges point from lower to higher cell") {
  const auto m = generate_nonconvex_mesh(3);
  for (const auto& e : m.edges()) {
    if (e.on_boundary()) continue;
    CHECK(e.cells[0] < e.cells[1]);
    const auto poly = m.cell_polygon(e.cells[1]);
    CHECK(point_in_polygon(e.midpoint + 1e-6 * e.length * e.normal, poly));
  }
}

TEST_CASE("triangulation") {
  const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto ts = triangulate_polygon(square);
  CHECK(ts.triangles.size() == 2);
  CHECK(triangulated_area(square, ts) == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<Point> chevron{{0, 0}, {2, 0.5}, {4, 0}, {2, 2}};
  const auto tc = triangulate_polygon(chevron);
  CHECK(tc.triangles.size() == 2);
  CHECK(std::abs(triangulated_area(chevron, tc) - shoelace(chevron)) < 1e-12 * shoelace(chevron));
  CHECK(shoelace(chevron) == doctest::Approx(3.0));

  const std::vector<Point> repeated{{0, 0}, {1, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK_THROWS_AS(triangulate_polygon(repeated), SelfIntersectingPolygon);
}

TEST_CASE("invalid meshes are rejected") {
  // clockwise loop
  CHECK_THROWS_AS(PolyMesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 3, 2, 1}}), MeshError);
  // bow tie
  CHECK_THROWS_AS(PolyMesh({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, {{0, 1, 2, 3}}), Error);
  // sliver below the shape-ratio threshold
  CHECK_THROWS_AS(PolyMesh({{0, 0}, {1, 0}, {1, 1e-5}}, {{0, 1, 2}}), MeshError);
}

TEST_CASE("mesh file round trip") {
  const auto m = generate_nonconvex_mesh(2);
  std::stringstream ss;
  write_mesh(ss, m);
  const auto back = read_mesh(ss);
  CHECK(back.num_cells() == m.num_cells());
  CHECK(back.num_edges() == m.num_edges());
  CHECK(back.loops() == m.loops());
  for (int v = 0; v < m.num_vertices(); ++v) CHECK((back.vertex(v) - m.vertex(v)).norm() < 1e-15);

  std::istringstream text("4 1\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n");
  const auto sq = read_mesh(text);
  CHECK(sq.cell(0).area == doctest::Approx(1.0));
  std::istringstream bad("4 1\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_mesh(bad), MeshError);
}

TEST_CASE("permuted and scaled meshes") {
  const auto m = generate_nonconvex_mesh(2);
  std::vector<int> order(m.num_cells());
  for (int i = 0; i < m.num_cells(); ++i) order[i] = m.num_cells() - 1 - i;
  const auto p = permute_cells(m, order);
  check_consistency(p);
  for (int i = 0; i < m.num_cells(); ++i) CHECK(p.cell(i).area == doctest::Approx(m.cell(order[i]).area));

  const auto s = scaled(m, 0.5);
  check_consistency(s);
  CHECK(s.h() == doctest::Approx(m.h() / 2));
}
