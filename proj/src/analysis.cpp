#include "wgbih/analysis.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "wgbih/errors.hpp"

namespace wgbih {

namespace {

constexpr double kPi = std::numbers::pi;

struct H2Parts {
  double laplacian = 0.0; // ||Lap v0||_T^2
  double trace = 0.0;     // h^-3 ||v0 - vb||^2
  double flux = 0.0;      // h^-1 ||grad v0 . n - sigma vn||^2
};

H2Parts h2_parts(const WeakSpace& space, int cell, const Eigen::VectorXd& local) {
  const auto& mesh = space.mesh();
  const auto& layout = space.layout();
  const auto& op = space.local(cell);
  const Cell& c = mesh.cell(cell);
  const int exactness = 2 * layout.k + 2;
  const Eigen::VectorXd v0 = local.head(layout.interior_size());

  H2Parts parts;
  {
    const auto rule = cell_quadrature(mesh, cell, exactness);
    const auto t = op.trial_basis.tabulate(rule.points, true);
    const Eigen::VectorXd lap = t.laplacian.transpose() * v0;
    for (std::size_t q = 0; q < rule.size(); ++q) parts.laplacian += rule.weights[q] * lap[q] * lap[q];
  }
  const double h = c.diameter;
  for (int le = 0; le < c.num_edges(); ++le) {
    const auto [edge, sigma] = c.edges[le];
    const Point n = sigma * mesh.edge(edge).normal;
    const auto rule = edge_quadrature(mesh, edge, exactness);
    const auto t = op.trial_basis.tabulate(rule.points, true);
    const Eigen::VectorXd val = t.values.transpose() * v0;
    const Eigen::VectorXd dn = (n.x() * t.dx + n.y() * t.dy).transpose() * v0;
    const Eigen::VectorXd vb =
        space.trace_basis().tabulate(rule).transpose() * local.segment(layout.trace_offset(le), layout.trace_size());
    const Eigen::VectorXd vn = space.normal_basis().tabulate(rule).transpose() *
                               local.segment(layout.normal_offset(le), layout.normal_size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double jump = val[q] - vb[q];
      const double flux = dn[q] - sigma * vn[q];
      parts.trace += rule.weights[q] * jump * jump / (h * h * h);
      parts.flux += rule.weights[q] * flux * flux / h;
    }
  }
  return parts;
}

Eigen::VectorXd projected_laplacian(const WeakSpace& space, const ManufacturedSolution& sol,
                                    int cell) {
  const auto& op = space.local(cell);
  return project_cell(sol.laplacian, space.mesh(), cell, op.test_basis,
                      data_exactness(space.layout().k, op.r));
}

PolyMesh single_cell_mesh(const PolyMesh& mesh, int cell) {
  std::vector<int> loop(mesh.cell(cell).num_edges());
  for (std::size_t i = 0; i < loop.size(); ++i) loop[i] = static_cast<int>(i);
  return PolyMesh(mesh.cell_polygon(cell), {loop});
}

} // namespace

ManufacturedSolution manufactured_trig() {
  ManufacturedSolution s;
  s.name = "trig";
  s.smoothness = 1000;
  s.u = [](const Point& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
  s.grad = [](const Point& x) {
    return Eigen::Vector2d(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()),
                           kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
  };
  s.laplacian = [u = s.u](const Point& x) { return -2 * kPi * kPi * u(x); };
  s.grad_laplacian = [g = s.grad](const Point& x) -> Eigen::Vector2d {
    return -2 * kPi * kPi * g(x);
  };
  s.f = [u = s.u](const Point& x) { return 4 * std::pow(kPi, 4) * u(x); };
  s.xi = s.u;
  s.nu = [g = s.grad](const Point& x, const Point& n) { return g(x).dot(n); };
  return s;
}

ManufacturedSolution manufactured_poly(int k) {
  if (k < 2) throw InvalidLayout("manufactured_poly needs k >= 2");
  ManufacturedSolution s;
  s.name = "poly";
  s.smoothness = 1000;
  // w = (x + 2y) / 3, so grad w = (1/3, 2/3) and |grad w|^2 = 5/9
  const bool extra = k >= 3;
  auto w = [](const Point& x) { return (x.x() + 2 * x.y()) / 3.0; };
  const Eigen::Vector2d gw(1.0 / 3.0, 2.0 / 3.0);
  const double c = 5.0 / 9.0;
  const double kk = k;
  s.u = [=](const Point& x) {
    return x.squaredNorm() + (extra ? std::pow(w(x), k) : 0.0);
  };
  s.grad = [=](const Point& x) -> Eigen::Vector2d {
    Eigen::Vector2d g = 2 * x;
    if (extra) g += kk * std::pow(w(x), k - 1) * gw;
    return g;
  };
  s.laplacian = [=](const Point& x) {
    return 4.0 + (extra ? c * kk * (kk - 1) * std::pow(w(x), k - 2) : 0.0);
  };
  s.grad_laplacian = [=](const Point& x) -> Eigen::Vector2d {
    if (!extra) return Eigen::Vector2d::Zero();
    return c * kk * (kk - 1) * (kk - 2) * std::pow(w(x), k - 3) * gw;
  };
  s.f = [=](const Point& x) {
    if (k < 4) return 0.0;
    return c * c * kk * (kk - 1) * (kk - 2) * (kk - 3) * std::pow(w(x), k - 4);
  };
  s.xi = s.u;
  s.nu = [g = s.grad](const Point& x, const Point& n) { return g(x).dot(n); };
  return s;
}

ManufacturedSolution manufactured_zero() {
  ManufacturedSolution s;
  s.name = "zero";
  s.smoothness = 1000;
  s.u = [](const Point&) { return 0.0; };
  s.grad = [](const Point&) -> Eigen::Vector2d { return Eigen::Vector2d::Zero(); };
  s.laplacian = s.u;
  s.grad_laplacian = s.grad;
  s.f = s.u;
  s.xi = s.u;
  s.nu = [](const Point&, const Point&) { return 0.0; };
  return s;
}

double energy_error(const WeakSpace& space, const ManufacturedSolution& sol,
                    const WeakDofVector& uh) {
  double sum = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const auto& op = space.local(c);
    const Eigen::VectorXd d = projected_laplacian(space, sol, c) - op.apply(space.gather(c, uh));
    sum += d.dot(op.mass * d);
  }
  return std::sqrt(std::max(sum, 0.0));
}

double energy_error_exact_traces(const WeakSpace& space, const ManufacturedSolution& sol,
                                 const WeakDofVector& uh) {
  double sum = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const auto& op = space.local(c);
    const Eigen::VectorXd exact =
        weak_laplacian_of_exact(sol.u, sol.grad, space.mesh(), c, op,
                                data_exactness(space.layout().k, op.r));
    const Eigen::VectorXd d = exact - op.apply(space.gather(c, uh));
    sum += d.dot(op.mass * d);
  }
  return std::sqrt(std::max(sum, 0.0));
}

double energy_norm(const WeakSpace& space, const WeakDofVector& v) {
  double sum = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c)
    sum += space.local(c).norm_squared(space.gather(c, v));
  return std::sqrt(std::max(sum, 0.0));
}

double discrete_h2_local(const WeakSpace& space, int cell, const Eigen::VectorXd& local) {
  const H2Parts p = h2_parts(space, cell, local);
  return p.laplacian + p.trace + p.flux;
}

double discrete_h2_norm(const WeakSpace& space, const WeakDofVector& v) {
  double sum = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c)
    sum += discrete_h2_local(space, c, space.gather(c, v));
  return std::sqrt(sum);
}

double l2_error(const WeakSpace& space, const ManufacturedSolution& sol, const WeakDofVector& uh) {
  const auto& mesh = space.mesh();
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& op = space.local(c);
    const auto rule = cell_quadrature(mesh, c, data_exactness(space.layout().k, op.r));
    const Eigen::VectorXd v0 = space.gather(c, uh).head(space.layout().interior_size());
    const Eigen::VectorXd vals = op.trial_basis.tabulate(rule.points, false).values.transpose() * v0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double d = sol.u(rule.points[q]) - vals[q];
      sum += rule.weights[q] * d * d;
    }
  }
  return std::sqrt(sum);
}

double residual_functional_ell(const WeakSpace& space, const ManufacturedSolution& sol,
                               const WeakDofVector& v) {
  const auto& mesh = space.mesh();
  const auto& layout = space.layout();
  const auto& dofs = space.dofs();
  for (int i = 0; i < dofs.size(); ++i)
    if (dofs.is_boundary(i) && v[i] != 0.0)
      throw BoundaryNotZero("test function has a non-zero boundary DOF at index " +
                            std::to_string(i));

  double ell = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cell(c);
    const auto& op = space.local(c);
    const Eigen::VectorXd qlap = projected_laplacian(space, sol, c);
    const Eigen::VectorXd local = space.gather(c, v);
    const Eigen::VectorXd v0 = local.head(layout.interior_size());
    const int exactness = data_exactness(layout.k, op.r);
    for (int le = 0; le < cell.num_edges(); ++le) {
      const auto [edge, sigma] = cell.edges[le];
      const Point n = sigma * mesh.edge(edge).normal;
      const auto rule = edge_quadrature(mesh, edge, exactness);
      const auto test = op.test_basis.tabulate(rule.points, true);
      const auto trial = op.trial_basis.tabulate(rule.points, true);
      const Eigen::VectorXd vb = space.trace_basis().tabulate(rule).transpose() *
                                 local.segment(layout.trace_offset(le), layout.trace_size());
      const Eigen::VectorXd vn = space.normal_basis().tabulate(rule).transpose() *
                                 local.segment(layout.normal_offset(le), layout.normal_size());
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.points[q];
        // g = (Q_r - I) Lap u
        const double g = test.values.col(q).dot(qlap) - sol.laplacian(x);
        const Eigen::Vector2d grad_g =
            Eigen::Vector2d(test.dx.col(q).dot(qlap), test.dy.col(q).dot(qlap)) -
            sol.grad_laplacian(x);
        const double v0x = trial.values.col(q).dot(v0);
        const double dnv0 = (n.x() * trial.dx.col(q) + n.y() * trial.dy.col(q)).dot(v0);
        ell += rule.weights[q] * (-(vb[q] - v0x) * grad_g.dot(n) + (sigma * vn[q] - dnv0) * g);
      }
    }
  }
  return ell;
}

double error_equation_lhs(const WeakSpace& space, const ManufacturedSolution& sol,
                          const WeakDofVector& uh, const WeakDofVector& v) {
  double sum = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const auto& op = space.local(c);
    const Eigen::VectorXd lap_u = weak_laplacian_of_exact(
        sol.u, sol.grad, space.mesh(), c, op, data_exactness(space.layout().k, op.r));
    const Eigen::VectorXd e = lap_u - op.apply(space.gather(c, uh));
    sum += e.dot(op.mass * op.apply(space.gather(c, v)));
  }
  return sum;
}

double commuting_identity_residual(const WeakSpace& space, const ManufacturedSolution& sol) {
  double worst = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const auto& op = space.local(c);
    const Eigen::VectorXd exact = weak_laplacian_of_exact(
        sol.u, sol.grad, space.mesh(), c, op, data_exactness(space.layout().k, op.r));
    const Eigen::VectorXd projected = projected_laplacian(space, sol, c);
    const Eigen::VectorXd d = exact - projected;
    const double denom = std::sqrt(projected.dot(op.mass * projected));
    worst = std::max(worst, std::sqrt(d.dot(op.mass * d)) / denom);
  }
  return worst;
}

ErrorReport error_report(const WeakSpace& space, const ManufacturedSolution& sol,
                         const WeakDofVector& uh) {
  ErrorReport r;
  r.h = space.mesh().h();
  r.ndof = space.dofs().size();
  r.energy = energy_error(space, sol, uh);
  r.h2 = discrete_h2_norm(space, inject_Qh(sol.u, sol.grad, space) - uh);
  r.l2 = l2_error(space, sol, uh);
  return r;
}

double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

Eigen::MatrixXd affine_kernel(const WeakSpace& space, int cell) {
  const int n = space.layout().local_size(space.mesh().cell(cell).num_edges());
  Eigen::MatrixXd k(n, 3);
  k.col(0) = inject_Qh_local([](const Point&) { return 1.0; },
                             [](const Point&) -> Eigen::Vector2d { return {0.0, 0.0}; }, space,
                             cell);
  k.col(1) = inject_Qh_local([](const Point& x) { return x.x(); },
                             [](const Point&) -> Eigen::Vector2d { return {1.0, 0.0}; }, space,
                             cell);
  k.col(2) = inject_Qh_local([](const Point& x) { return x.y(); },
                             [](const Point&) -> Eigen::Vector2d { return {0.0, 1.0}; }, space,
                             cell);
  return k;
}

NormEquivalence verify_norm_equivalence(const PolyMesh& mesh, int cell, const WeakDofLayout& layout,
                                        int trials, std::uint64_t seed) {
  if (trials < 100) throw Error("verify_norm_equivalence needs at least 100 trials");
  const PolyMesh local_mesh = single_cell_mesh(mesh, cell);
  const WeakSpace space(local_mesh, layout);
  const auto& op = space.local(0);
  const int n = space.dofs().size();

  // Sample w ~ N(0, I) and set v = S w. S multiplies the interior block
  // (L2-orthonormal basis, values ~ 1/h) by h and the normal-derivative block
  // by 1/h, so the sampled distribution is invariant under rescaling of the cell.
  const double h = local_mesh.cell(0).diameter;
  Eigen::VectorXd scaling = Eigen::VectorXd::Ones(n);
  const auto& layout0 = space.layout();
  scaling.head(layout0.interior_size()).setConstant(h);
  for (int le = 0; le < local_mesh.cell(0).num_edges(); ++le)
    scaling.segment(layout0.normal_offset(le), layout0.normal_size()).setConstant(1.0 / h);

  const Eigen::MatrixXd kernel = scaling.cwiseInverse().asDiagonal() * affine_kernel(space, 0);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(kernel).householderQ() *
                            Eigen::MatrixXd::Identity(n, 3);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  NormEquivalence out;
  out.c_min = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    v -= q * (q.transpose() * v);
    v = scaling.asDiagonal() * v;
    const double energy = op.norm_squared(v);
    const H2Parts parts = h2_parts(space, 0, v);
    const double h2 = parts.laplacian + parts.trace + parts.flux;
    if (!(h2 > 0.0)) continue;
    const double ratio = std::sqrt(energy / h2);
    out.c_min = std::min(out.c_min, ratio);
    out.c_max = std::max(out.c_max, ratio);
    if (energy > 0.0)
      out.max_laplacian_ratio = std::max(out.max_laplacian_ratio, std::sqrt(parts.laplacian / energy));
    ++out.samples;
  }
  return out;
}

} // namespace wgbih
