#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wgbih/basis.hpp"
#include "wgbih/dofs.hpp"
#include "wgbih/errors.hpp"
#include "wgbih/quadrature.hpp"

using namespace wgbih;

namespace {

constexpr double kPi = std::numbers::pi;

double integrate(const QuadratureRule& rule, const ScalarField& f) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(rule.points[q]);
  return s;
}

// int over triangle (a, b, c) of x, by the vertex average formula
double triangle_moment_x(const Point& a, const Point& b, const Point& c) {
  const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  return area * (a.x() + b.x() + c.x()) / 3.0;
}

} // namespace

TEST_CASE("cell quadrature integrates polynomials") {
  const auto sq = generate_square_mesh(1);
  CHECK(integrate(cell_quadrature(sq, 0, 3), [](const Point& x) { return x.x() * x.x() * x.y(); }) ==
        doctest::Approx(1.0 / 6).epsilon(1e-14));

  // int_[0,1]^2 x^a y^b = 1 / ((a+1)(b+1))
  for (int ex : {4, 10, 22, 30}) {
    const auto rule = cell_quadrature(sq, 0, ex);
    CHECK(rule.measure() == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= ex; ++a) {
      const int b = ex - a;
      const double v =
          integrate(rule, [&](const Point& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); });
      CHECK(std::abs(v - 1.0 / ((a + 1) * (b + 1))) <= 1e-12 / ((a + 1) * (b + 1)));
    }
  }
}

TEST_CASE("chevron moment matches the triangle decomposition") {
  const std::vector<Point> p{{0, 0}, {2, 0.5}, {4, 0}, {2, 2}};
  const PolyMesh m(p, {{0, 1, 2, 3}});
  const auto rule = cell_quadrature(m, 0, 4);
  // split along the reflex diagonal (2, 0.5)-(2, 2)
  const double exact = triangle_moment_x(p[0], p[1], p[3]) + triangle_moment_x(p[1], p[2], p[3]);
  CHECK(integrate(rule, [](const Point& x) { return x.x(); }) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(rule.measure() == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("quadrature weights sum to the measure on every cell") {
  const auto m = generate_nonconvex_mesh(3);
  for (int c = 0; c < m.num_cells(); ++c)
    CHECK(std::abs(cell_quadrature(m, c, 24).measure() - m.cell(c).area) <= 1e-12 * m.cell(c).area);
  for (int e = 0; e < m.num_edges(); ++e)
    CHECK(std::abs(edge_quadrature(m, e, 7).measure() - m.edge(e).length) <= 1e-12);
}

TEST_CASE("edge quadrature") {
  const Point a(0, 0), b(1, 0);
  auto s2 = [](const Point& x) { return x.x() * x.x(); };
  const auto two = segment_quadrature(a, b, 3);
  CHECK(two.size() == 2);
  CHECK(two.exactness == 3);
  CHECK(integrate(two, s2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  // one-point midpoint rule misses by 1/12
  const auto one = segment_quadrature(a, b, 1);
  CHECK(one.size() == 1);
  CHECK(std::abs(integrate(one, s2) - 1.0 / 3) == doctest::Approx(1.0 / 12));
  CHECK(two.params.front() < two.params.back());
  CHECK((segment_quadrature(a, b, 5).points.front() - a).norm() <
        (segment_quadrature(a, b, 5).points.back() - a).norm());
}

TEST_CASE("unsupported exactness") {
  const auto m = generate_square_mesh(1);
  CHECK_THROWS_AS(cell_quadrature(m, 0, kMaxExactness + 1), UnsupportedDegree);
  CHECK_THROWS_AS(segment_quadrature({0, 0}, {1, 0}, -1), UnsupportedDegree);
  // the table reaches 2 (2 N_max + k_max - 2) for N = 5, k = 3
  CHECK_NOTHROW(cell_quadrature(m, 0, 2 * (2 * 5 + 3 - 2)));
}

TEST_CASE("basis dimensions and mass matrices") {
  const auto m = generate_nonconvex_mesh(2);
  for (int deg = 0; deg <= 11; ++deg) {
    for (int c : {0, 1}) {
      const auto basis = CellBasis::make(m, c, deg);
      CHECK(basis.dim() == (deg + 1) * (deg + 2) / 2);
      const Eigen::MatrixXd mass = cell_mass_matrix(m, c, basis);
      CHECK((mass - mass.transpose()).norm() <= 1e-13 * mass.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mass);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      // exactness saturation: two more orders change nothing
      const Eigen::MatrixXd more = cell_mass_matrix(m, c, basis, mass_exactness(deg) + 2);
      CHECK((more - mass).norm() <= 1e-12 * mass.norm());
    }
  }
  const auto ortho = CellBasis::make(m, 0, 8);
  CHECK(ortho.orthonormal());
  const Eigen::MatrixXd mo = cell_mass_matrix(m, 0, ortho);
  CHECK((mo - Eigen::MatrixXd::Identity(mo.rows(), mo.cols())).norm() < 1e-11);

  for (int deg = 0; deg <= 4; ++deg) {
    const Eigen::MatrixXd me = edge_mass_matrix(m, 0, EdgeBasis(deg));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(me);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("orthonormal basis derivatives match finite differences") {
  const auto m = generate_nonconvex_mesh(1);
  const auto basis = CellBasis::make(m, 1, 7);
  const Point x = m.cell(1).interior_point;
  const double h = 1e-4;
  const auto t = basis.tabulate({x}, true);
  const Point ex(h, 0), ey(0, h);
  const Eigen::VectorXd fx = (basis.values(x + ex) - basis.values(x - ex)) / (2 * h);
  const Eigen::VectorXd fy = (basis.values(x + ey) - basis.values(x - ey)) / (2 * h);
  const Eigen::VectorXd lap = (basis.values(x + ex) + basis.values(x - ex) + basis.values(x + ey) +
                               basis.values(x - ey) - 4 * basis.values(x)) /
                              (h * h);
  CHECK((fx - t.dx.col(0)).norm() <= 1e-5 * t.dx.norm());
  CHECK((fy - t.dy.col(0)).norm() <= 1e-5 * t.dy.norm());
  CHECK((lap - t.laplacian.col(0)).norm() <= 1e-3 * t.laplacian.norm());
}

TEST_CASE("cell projections") {
  const auto sq = generate_square_mesh(1);
  auto trig = [](const Point& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
  const auto c0 = project_cell(trig, sq, 0, CellBasis::make(sq, 0, 0), 40);
  CHECK(c0[0] == doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-13));

  const auto m = generate_nonconvex_mesh(2);
  for (int c = 0; c < m.num_cells(); ++c) {
    for (int deg : {0, 2, 5, 8, 11}) {
      const auto basis = CellBasis::make(m, c, deg);
      // constants
      const auto one = project_cell([](const Point&) { return 1.0; }, m, c, basis, 2 * deg + 2);
      CHECK(std::abs(basis.evaluate(one, m.cell(c).interior_point) - 1.0) < 1e-12);
      // basis function j maps to e_j
      const int j = basis.dim() - 1;
      const auto ej = project_cell(
          [&](const Point& x) { return basis.values(x)[j]; }, m, c, basis, 2 * deg + 2);
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(basis.dim());
      unit[j] = 1.0;
      CHECK((ej - unit).norm() < 1e-11);
      // idempotence
      const auto pt = project_cell(trig, m, c, basis, 2 * deg + 6);
      const auto again = project_cell(
          [&](const Point& x) { return basis.evaluate(pt, x); }, m, c, basis, 2 * deg + 2);
      CHECK((again - pt).norm() <= 1e-13 * std::max(1.0, pt.norm()));
    }
    // reproduction of a full degree-m polynomial
    for (int deg : {3, 6, 11}) {
      auto poly = [deg](const Point& x) {
        double s = 0.0;
        for (int a = 0; a <= deg; ++a) s += (a + 1) * std::pow(x.x() - 0.3, a) * std::pow(x.y() + 0.1, deg - a);
        return s;
      };
      const auto basis = CellBasis::make(m, c, deg);
      const auto co = project_cell(poly, m, c, basis, 2 * deg + 2);
      for (const auto& x : cell_quadrature(m, c, 6).points)
        CHECK(std::abs(basis.evaluate(co, x) - poly(x)) <= 1e-10 * std::max(1.0, std::abs(poly(x))));
    }
  }
}

TEST_CASE("edge projections") {
  const auto m = generate_square_mesh(1);
  const EdgeBasis b0(0), b1(1);
  const auto c = project_edge([](const Point&) { return 2.5; }, m, 0, b0, 4);
  CHECK(c[0] == doctest::Approx(2.5));

  // f linear in s along the edge
  const Edge& e = m.edge(0);
  const Point a = m.vertex(e.vertices[0]), b = m.vertex(e.vertices[1]);
  auto s_of = [&](const Point& x) { return 2.0 * (x - a).dot(b - a) / (b - a).squaredNorm() - 1.0; };
  const auto lin = project_edge([&](const Point& x) { return 3.0 - 2.0 * s_of(x); }, m, 0, b1, 4);
  CHECK(lin[0] == doctest::Approx(3.0));
  CHECK(lin[1] == doctest::Approx(-2.0));

  const auto mean = project_edge([&](const Point& x) { return std::pow(s_of(x), 2); }, m, 0, b0, 4);
  CHECK(mean[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("weak injection") {
  const auto m = generate_nonconvex_mesh(2);
  for (int k : {2, 3}) {
    const WeakSpace space(m, WeakDofLayout::standard(k));
    const auto& dofs = space.dofs();
    const auto& layout = space.layout();

    const auto one = inject_Qh([](const Point&) { return 1.0; },
                               [](const Point&) { return Eigen::Vector2d::Zero(); }, space);
    for (int c = 0; c < m.num_cells(); ++c)
      CHECK(std::abs(space.local(c).trial_basis.evaluate(
                         one.segment(dofs.cell_offset(c), layout.interior_size()),
                         m.cell(c).interior_point) -
                     1.0) < 1e-12);
    for (int e = 0; e < m.num_edges(); ++e) {
      CHECK(one[dofs.trace_offset(e)] == doctest::Approx(1.0));
      CHECK(one.segment(dofs.trace_offset(e) + 1, layout.p).norm() < 1e-13);
      CHECK(one.segment(dofs.normal_offset(e), layout.normal_size()).norm() < 1e-13);
    }
  }

  // x^2 + y^2 with k=2, p=2, q=1: v_n is the exact (2x, 2y) . n_e on every edge
  const WeakSpace space(m, WeakDofLayout::standard(2));
  const auto v = inject_Qh([](const Point& x) { return x.squaredNorm(); },
                           [](const Point& x) { return Eigen::Vector2d(2 * x); }, space);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edge(e);
    const Point a = m.vertex(edge.vertices[0]), b = m.vertex(edge.vertices[1]);
    const Eigen::VectorXd vn = v.segment(space.dofs().normal_offset(e), 2);
    for (double s : {-1.0, -0.2, 0.7, 1.0}) {
      const Point x = 0.5 * (1 - s) * a + 0.5 * (1 + s) * b;
      CHECK(space.normal_basis().evaluate(vn, s) == doctest::Approx(2 * x.dot(edge.normal)).epsilon(1e-13));
      const Eigen::VectorXd vb = v.segment(space.dofs().trace_offset(e), 3);
      CHECK(space.trace_basis().evaluate(vb, s) == doctest::Approx(x.squaredNorm()).epsilon(1e-13));
    }
  }
}

TEST_CASE("solve_mass rejects singular systems") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 1.0;
  CHECK_THROWS_AS(solve_mass(m, Eigen::VectorXd::Ones(2)), SingularMass);
}
