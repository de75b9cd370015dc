#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wgbih/analysis.hpp"
#include "wgbih/errors.hpp"

using namespace wgbih;

namespace {

constexpr double kPi = std::numbers::pi;

// second-order central differences
double fd_laplacian(const ScalarField& u, const Point& x, double d = 1e-4) {
  const Point ex(d, 0), ey(0, d);
  return (u(x + ex) + u(x - ex) + u(x + ey) + u(x - ey) - 4 * u(x)) / (d * d);
}

Eigen::Vector2d fd_grad(const ScalarField& u, const Point& x, double d = 1e-6) {
  const Point ex(d, 0), ey(0, d);
  return {(u(x + ex) - u(x - ex)) / (2 * d), (u(x + ey) - u(x - ey)) / (2 * d)};
}

WeakDofVector random_interior(const WeakSpace& space, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  WeakDofVector v(space.dofs().size());
  for (int i = 0; i < v.size(); ++i) v[i] = space.dofs().is_boundary(i) ? 0.0 : normal(rng);
  return v;
}

SolveResult run(const WeakSpace& space, const ManufacturedSolution& sol) {
  return solve(assemble(space, sol.f, impose_boundary(space, sol.xi, sol.nu)));
}

} // namespace

TEST_CASE("manufactured solutions are self-consistent") {
  const std::vector<Point> pts{{0.3, 0.7}, {0.55, 0.2}, {0.9, 0.45}};
  for (const auto& sol : {manufactured_trig(), manufactured_poly(2), manufactured_poly(3),
                          manufactured_poly(5)}) {
    for (const auto& x : pts) {
      CHECK((sol.grad(x) - fd_grad(sol.u, x)).norm() < 1e-7);
      CHECK(sol.laplacian(x) == doctest::Approx(fd_laplacian(sol.u, x)).epsilon(1e-5));
      CHECK((sol.grad_laplacian(x) - fd_grad(sol.laplacian, x)).norm() < 1e-6);
      CHECK(sol.f(x) == doctest::Approx(fd_laplacian(sol.laplacian, x)).epsilon(1e-5));
      CHECK(sol.xi(x) == sol.u(x));
      CHECK(sol.nu(x, {0.6, 0.8}) == doctest::Approx(sol.grad(x).dot(Point(0.6, 0.8))));
    }
  }
  const auto trig = manufactured_trig();
  CHECK(trig.f({0.5, 0.5}) == doctest::Approx(4 * std::pow(kPi, 4)));
  for (double t : {0.0, 0.3, 1.0}) {
    CHECK(std::abs(trig.xi({t, 0.0})) < 1e-15);
    CHECK(std::abs(trig.xi({1.0, t})) < 1e-15);
  }
  CHECK(manufactured_poly(2).f({0.2, 0.9}) == 0.0);
  CHECK(manufactured_poly(3).f({0.2, 0.9}) == 0.0);
}

TEST_CASE("discrete H2 norm on simple functions") {
  const auto mesh = generate_nonconvex_mesh(2);
  const WeakSpace space(mesh, WeakDofLayout::standard(2));
  auto affine = [](const Point& x) { return 2 * x.x() - 3 * x.y() + 1; };
  auto affine_grad = [](const Point&) { return Eigen::Vector2d(2, -3); };
  CHECK(discrete_h2_norm(space, inject_Qh(affine, affine_grad, space)) < 1e-12);

  const auto sq = generate_square_mesh(1);
  const WeakSpace one(sq, WeakDofLayout::standard(2));
  const auto quad = inject_Qh([](const Point& x) { return x.squaredNorm(); },
                              [](const Point& x) { return Eigen::Vector2d(2 * x); }, one);
  // traces are exact, so only ||Lap v0||^2 = 16 survives
  CHECK(discrete_h2_norm(one, quad) == doctest::Approx(4.0).epsilon(1e-12));

  // unit trace DOF: h^-3 int_e chi_0^2
  const auto layout = one.layout();
  WeakDofVector v = WeakDofVector::Zero(one.dofs().size());
  const int e = sq.cell(0).edges[2].edge;
  v[one.dofs().trace_offset(e)] = 1.0;
  const auto& gl = gauss_legendre(4);
  double oracle = 0.0;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(layout.trace_size());
  unit[0] = 1.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    oracle += 0.5 * sq.edge(e).length * gl.weights[i] * std::pow(one.trace_basis().evaluate(unit, gl.nodes[i]), 2);
  oracle /= std::pow(std::sqrt(2.0), 3);
  CHECK(discrete_h2_norm(one, v) == doctest::Approx(std::sqrt(oracle)).epsilon(1e-13));
}

TEST_CASE("consistency functional vanishes for polynomial data") {
  const auto mesh = generate_nonconvex_mesh(2);
  std::mt19937_64 rng(11);
  for (int k : {2, 3}) {
    const WeakSpace space(mesh, WeakDofLayout::standard(k));
    const auto sol = manufactured_poly(k);
    for (int t = 0; t < 5; ++t)
      CHECK(std::abs(residual_functional_ell(space, sol, random_interior(space, rng))) < 1e-10);
  }
}

TEST_CASE("consistency functional rejects boundary DOFs") {
  const auto mesh = generate_square_mesh(2);
  const WeakSpace space(mesh, WeakDofLayout::standard(2));
  WeakDofVector v = WeakDofVector::Zero(space.dofs().size());
  v[space.dofs().trace_offset(mesh.boundary_edges().front())] = 1.0;
  CHECK_THROWS_AS(residual_functional_ell(space, manufactured_trig(), v), BoundaryNotZero);
}

TEST_CASE("error equation") {
  const auto sol = manufactured_trig();
  std::mt19937_64 rng(2024);
  for (const auto& mesh : {generate_square_mesh(2), generate_nonconvex_mesh(4)}) {
    const WeakSpace space(mesh, WeakDofLayout::standard(2));
    const auto uh = run(space, sol).solution;
    for (int t = 0; t < 20; ++t) {
      const auto v = random_interior(space, rng);
      const double lhs = error_equation_lhs(space, sol, uh, v);
      const double rhs = residual_functional_ell(space, sol, v);
      const double scale = energy_norm(space, v) * energy_error_exact_traces(space, sol, uh);
      CHECK(std::abs(lhs - rhs) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("energy error variants and L2 error") {
  const auto mesh = generate_nonconvex_mesh(2);
  const WeakSpace space(mesh, WeakDofLayout::standard(3));
  const auto sol = manufactured_trig();
  const auto uh = run(space, sol).solution;
  CHECK(energy_error(space, sol, uh) ==
        doctest::Approx(energy_error_exact_traces(space, sol, uh)).epsilon(1e-6));
  CHECK(commuting_identity_residual(space, sol) < 1e-8);

  const auto qh = inject_Qh(sol.u, sol.grad, space);
  // u0 = Q0 u: the error is the L2 projection error of u
  double direct = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& op = space.local(c);
    const Eigen::VectorXd v0 = space.gather(c, qh).head(space.layout().interior_size());
    const auto rule = cell_quadrature(mesh, c, 30);
    for (std::size_t q = 0; q < rule.size(); ++q)
      direct += rule.weights[q] * std::pow(sol.u(rule.points[q]) - op.trial_basis.evaluate(v0, rule.points[q]), 2);
  }
  CHECK(l2_error(space, sol, qh) == doctest::Approx(std::sqrt(direct)).epsilon(1e-4));
  CHECK(l2_error(space, manufactured_zero(), WeakDofVector::Zero(space.dofs().size())) == 0.0);
}

TEST_CASE("observed rate") {
  CHECK(observed_rate(1.0, 0.25, 0.2, 0.1) == doctest::Approx(2.0));
  CHECK(observed_rate(8.0, 1.0, 1.0, 0.5) == doctest::Approx(3.0));
}

TEST_CASE("bubble functions") {
  for (const auto& mesh : {generate_square_mesh(1), generate_nonconvex_mesh(1)}) {
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const BubbleFunction b(mesh, c);
      const auto poly = mesh.cell_polygon(c);
      CHECK(b.num_edges() == static_cast<int>(poly.size()));
      CHECK(b.element(b.normalization_point()) == doctest::Approx(1.0));
      CHECK(b.rho0() > 0.0);
      CHECK(b.rho0_radius() > 0.0);
      for (int k = 0; k < b.num_edges(); ++k) {
        const Point& a = poly[k];
        const Point& e = poly[(k + 1) % poly.size()];
        const Point mid = 0.5 * (a + e);
        CHECK(std::abs(b.line(k, mid)) < 1e-14);
        CHECK(std::abs(b.element(mid)) < 1e-14);
        for (int j = 0; j < b.num_edges(); ++j)
          if (j != k) CHECK(std::abs(b.edge(j, mid)) < 1e-14);
        CHECK(b.rho1(k) > 0.0);
        const auto [s0, s1] = b.rho1_interval(k);
        CHECK(0.0 <= s0);
        CHECK(s0 < s1);
        CHECK(s1 <= 1.0);
        // extended lines of other edges may cross edge k, so probe inside the interval
        CHECK(b.edge(k, a + 0.5 * (s0 + s1) * (e - a)) > 0.0);
        for (double t = s0; t <= s1; t += (s1 - s0) / 8)
          CHECK(b.edge(k, a + t * (e - a)) >= b.rho1(k) * (1 - 1e-12));
      }
    }
  }
}

TEST_CASE("norm equivalence") {
  const auto mesh = generate_nonconvex_mesh(1);
  const auto layout = WeakDofLayout::standard(2);
  const auto a = verify_norm_equivalence(mesh, 0, layout, 200);
  CHECK(a.samples == 200);
  CHECK(a.c_min > 0.0);
  CHECK(a.c_min <= a.c_max);
  CHECK(std::isfinite(a.max_laplacian_ratio));
  const auto b = verify_norm_equivalence(scaled(mesh, 0.125), 0, layout, 200);
  CHECK(b.c_min == doctest::Approx(a.c_min).epsilon(1e-8));
  CHECK(b.c_max == doctest::Approx(a.c_max).epsilon(1e-8));
  CHECK_THROWS_AS(verify_norm_equivalence(mesh, 0, layout, 99), Error);
}
