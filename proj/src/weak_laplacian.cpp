#include "wgbih/weak_laplacian.hpp"

#include <cmath>
#include <sstream>

#include "wgbih/errors.hpp"

namespace wgbih {

int choose_r(int num_edges, int k, RMode mode, int custom_r) {
  switch (mode) {
  case RMode::nonconvex:
    return 2 * num_edges + k - 2;
  case RMode::convex:
    return num_edges + k - 2;
  case RMode::custom:
    if (custom_r < k - 2 || custom_r < 0)
      throw InvalidR("r = " + std::to_string(custom_r) + " must be >= k - 2 = " +
                     std::to_string(k - 2));
    return custom_r;
  }
  throw InvalidR("unknown r mode");
}

WeakDofLayout WeakDofLayout::standard(int k, RMode mode, int custom_r) {
  WeakDofLayout l;
  l.k = k;
  l.p = k;
  l.q = k - 1;
  l.mode = mode;
  l.custom_r = custom_r;
  return l;
}

void WeakDofLayout::validate() const {
  if (k < 2) throw InvalidLayout("k must be >= 2");
  if (!(k >= p && p >= q && q >= 1))
    throw InvalidLayout("degrees must satisfy k >= p >= q >= 1 (k=" + std::to_string(k) +
                        ", p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")");
  if (mode == RMode::custom) choose_r(3, k, mode, custom_r);
}

double LocalWeakLaplacian::norm_squared(const Eigen::VectorXd& local_dofs) const {
  const Eigen::VectorXd w = matrix * local_dofs;
  return w.dot(mass * w);
}

LocalWeakLaplacian build_local_weak_laplacian(const PolyMesh& mesh, int cell,
                                              const WeakDofLayout& layout) {
  layout.validate();
  const Cell& c = mesh.cell(cell);
  const int nedges = c.num_edges();

  LocalWeakLaplacian op;
  op.r = layout.r_for(nedges);
  op.test_basis = CellBasis::make(mesh, cell, op.r);
  op.trial_basis = CellBasis::make(mesh, cell, layout.k);
  const int exactness = mass_exactness(op.r);

  const int nr = op.test_basis.dim();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nr, layout.local_size(nedges));

  {
    const auto rule = cell_quadrature(mesh, cell, exactness);
    const auto test = op.test_basis.tabulate(rule.points, true);
    const Eigen::MatrixXd trial = op.trial_basis.tabulate(rule.points, false).values;
    op.mass = mass_matrix(test.values, rule);
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(),
                                              static_cast<Eigen::Index>(rule.size()));
    rhs.leftCols(layout.interior_size()) = test.laplacian * w.asDiagonal() * trial.transpose();
  }

  const EdgeBasis trace_basis(layout.p);
  const EdgeBasis normal_basis(layout.q);
  for (int le = 0; le < nedges; ++le) {
    const auto [edge, sigma] = c.edges[le];
    const Point n = sigma * mesh.edge(edge).normal;
    const auto rule = edge_quadrature(mesh, edge, exactness);
    const auto test = op.test_basis.tabulate(rule.points, true);
    const Eigen::MatrixXd tr = trace_basis.tabulate(rule);
    const Eigen::MatrixXd nb = normal_basis.tabulate(rule);
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(),
                                              static_cast<Eigen::Index>(rule.size()));
    const Eigen::MatrixXd dn = n.x() * test.dx + n.y() * test.dy;
    rhs.middleCols(layout.trace_offset(le), layout.trace_size()) =
        -dn * w.asDiagonal() * tr.transpose();
    rhs.middleCols(layout.normal_offset(le), layout.normal_size()) =
        sigma * test.values * w.asDiagonal() * nb.transpose();
  }

  op.matrix = solve_mass(op.mass, rhs);
  return op;
}

Eigen::VectorXd weak_laplacian_of_exact(const ScalarField& /*u*/, const VectorField& grad_u,
                                        const PolyMesh& mesh, int cell,
                                        const LocalWeakLaplacian& op, int exactness) {
  const Cell& c = mesh.cell(cell);
  exactness = std::max(exactness, mass_exactness(op.r));
  // With v0 and vb both exact traces of u, Green's formula folds
  // (v0, Lap phi) - <vb, grad phi . n> into -(grad u, grad phi). Subtracting the
  // gradient at the cell centre (Lap_w of an affine function is zero) keeps the
  // remaining integrands small; both steps only reduce cancellation.
  const Point x0 = 0.5 * (c.bbox_min + c.bbox_max);
  const Point g0 = grad_u(x0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.test_basis.dim());
  {
    const auto rule = cell_quadrature(mesh, cell, exactness);
    const auto test = op.test_basis.tabulate(rule.points, true);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point g = grad_u(rule.points[q]) - g0;
      rhs -= rule.weights[q] * (g.x() * test.dx.col(q) + g.y() * test.dy.col(q));
    }
  }
  for (const auto& [edge, sigma] : c.edges) {
    const Edge& e = mesh.edge(edge);
    const auto rule = edge_quadrature(mesh, edge, exactness);
    const auto test = op.test_basis.tabulate(rule.points, false);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double un = (grad_u(rule.points[q]) - g0).dot(e.normal); // v_n = grad u . n_e
      rhs += rule.weights[q] * un * sigma * test.values.col(q);
    }
  }
  return solve_mass(op.mass, rhs);
}

std::string LocalOperatorCache::key(const PolyMesh& mesh, int cell, const WeakDofLayout& layout) {
  const Cell& c = mesh.cell(cell);
  const Point center = 0.5 * (c.bbox_min + c.bbox_max);
  std::ostringstream os;
  os << layout.k << ' ' << layout.p << ' ' << layout.q << ' ' << layout.r_for(c.num_edges())
     << '|';
  for (std::size_t i = 0; i < c.vertices.size(); ++i) {
    const Point rel = (mesh.vertex(c.vertices[i]) - center) / c.diameter;
    os << std::llround(rel.x() * 1e10) << ',' << std::llround(rel.y() * 1e10) << ','
       << c.edges[i].sign << ';';
  }
  os << std::llround(c.diameter * 1e12);
  return os.str();
}

LocalWeakLaplacian LocalOperatorCache::get(const PolyMesh& mesh, int cell,
                                           const WeakDofLayout& layout) {
  const std::string k = key(mesh, cell, layout);
  const Cell& c = mesh.cell(cell);
  const Point center = 0.5 * (c.bbox_min + c.bbox_max);
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(k);
    if (it != entries_.end()) {
      ++hits_;
      LocalWeakLaplacian op = it->second;
      op.test_basis = op.test_basis.translated_to(center);
      op.trial_basis = op.trial_basis.translated_to(center);
      return op;
    }
  }
  LocalWeakLaplacian op = build_local_weak_laplacian(mesh, cell, layout);
  std::lock_guard lock(mutex_);
  ++misses_;
  entries_.emplace(k, op);
  return op;
}

std::size_t LocalOperatorCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t LocalOperatorCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::size_t LocalOperatorCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

} // namespace wgbih
