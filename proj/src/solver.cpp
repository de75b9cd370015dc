#include "wgbih/solver.hpp"

#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "wgbih/errors.hpp"

namespace wgbih {

Eigen::MatrixXd local_stiffness(const LocalWeakLaplacian& op) {
  Eigen::MatrixXd k = op.matrix.transpose() * op.mass * op.matrix;
  return 0.5 * (k + k.transpose());
}

EdgeBoundaryData boundary_edge_values(const Point& a, const Point& b, const Point& normal,
                                      int sigma, const EdgeBasis& trace_basis,
                                      const EdgeBasis& normal_basis, const ScalarField& xi,
                                      const NormalData& nu, int exactness) {
  const Point outward = sigma * normal;
  const auto rule = segment_quadrature(
      a, b, std::max({exactness, mass_exactness(trace_basis.degree()),
                      mass_exactness(normal_basis.degree())}));
  const Eigen::MatrixXd tr = trace_basis.tabulate(rule);
  const Eigen::MatrixXd nb = normal_basis.tabulate(rule);
  Eigen::VectorXd mt = Eigen::VectorXd::Zero(tr.rows());
  Eigen::VectorXd mn = Eigen::VectorXd::Zero(nb.rows());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    mt += rule.weights[q] * xi(rule.points[q]) * tr.col(q);
    mn += rule.weights[q] * nu(rule.points[q], outward) * nb.col(q);
  }
  EdgeBoundaryData out;
  out.trace = solve_mass(mass_matrix(tr, rule), mt);
  out.normal = sigma * solve_mass(mass_matrix(nb, rule), mn);
  return out;
}

BoundaryValues impose_boundary(const WeakSpace& space, const ScalarField& xi, const NormalData& nu) {
  const auto& mesh = space.mesh();
  const auto& dofs = space.dofs();
  const auto& layout = space.layout();
  BoundaryValues bc{Eigen::VectorXd::Zero(dofs.size())};
  for (int e : mesh.boundary_edges()) {
    const Edge& edge = mesh.edge(e);
    const int sigma = mesh.edge_sign(edge.cells[0], e);
    const auto data = boundary_edge_values(mesh.vertex(edge.vertices[0]),
                                           mesh.vertex(edge.vertices[1]), edge.normal, sigma,
                                           space.trace_basis(), space.normal_basis(), xi, nu,
                                           data_exactness(layout.k, 0));
    bc.values.segment(dofs.trace_offset(e), layout.trace_size()) = data.trace;
    bc.values.segment(dofs.normal_offset(e), layout.normal_size()) = data.normal;
  }
  return bc;
}

BoundaryValues homogeneous_boundary(const WeakSpace& space) {
  return {Eigen::VectorXd::Zero(space.dofs().size())};
}

void assemble_full(const WeakSpace& space, const ScalarField& f, SparseMatrix& matrix,
                   Eigen::VectorXd& load) {
  const auto& mesh = space.mesh();
  const auto& dofs = space.dofs();
  const int n = dofs.size();
  const int ni = space.layout().interior_size();

  std::vector<Eigen::Triplet<double>> triplets;
  load = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& op = space.local(c);
    const auto& idx = dofs.local_to_global(c);
    const Eigen::MatrixXd k = local_stiffness(op);
    for (int i = 0; i < k.rows(); ++i)
      for (int j = 0; j < k.cols(); ++j)
        if (k(i, j) != 0.0) triplets.emplace_back(idx[i], idx[j], k(i, j));

    const auto rule = cell_quadrature(mesh, c, data_exactness(space.layout().k, op.r));
    const Eigen::MatrixXd vals = op.trial_basis.tabulate(rule.points, false).values;
    for (std::size_t q = 0; q < rule.size(); ++q)
      load.segment(dofs.cell_offset(c), ni) += rule.weights[q] * f(rule.points[q]) * vals.col(q);
  }
  matrix.resize(n, n);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
}

GlobalSystem assemble(const WeakSpace& space, const ScalarField& f, const BoundaryValues& bc) {
  const auto& dofs = space.dofs();
  SparseMatrix full;
  Eigen::VectorXd load;
  assemble_full(space, f, full, load);

  GlobalSystem sys;
  sys.total_dofs = dofs.size();
  sys.constrained_values = bc.values;
  std::vector<int> reduced(dofs.size(), -1);
  for (int i = 0; i < dofs.size(); ++i) {
    if (dofs.is_boundary(i)) {
      sys.constrained_dofs.push_back(i);
    } else {
      reduced[i] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(i);
    }
  }
  const int nf = static_cast<int>(sys.free_dofs.size());
  sys.rhs.resize(nf);
  for (int i = 0; i < nf; ++i) sys.rhs[i] = load[sys.free_dofs[i]];

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(full.nonZeros());
  for (int col = 0; col < full.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (reduced[row] < 0) continue;
      if (reduced[col] >= 0)
        triplets.emplace_back(reduced[row], reduced[col], it.value());
      else
        sys.rhs[reduced[row]] -= it.value() * bc.values[col];
    }
  }
  sys.matrix.resize(nf, nf);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

namespace {

WeakDofVector merge(const GlobalSystem& system, const Eigen::VectorXd& x) {
  WeakDofVector full = system.constrained_values;
  for (std::size_t i = 0; i < system.free_dofs.size(); ++i) full[system.free_dofs[i]] = x[i];
  return full;
}

double residual_measure(const GlobalSystem& system, const Eigen::VectorXd& x) {
  const double r = (system.matrix * x - system.rhs).norm();
  const double b = system.rhs.norm();
  return b > 0 ? r / b : r;
}

} // namespace

SolveResult solve(const GlobalSystem& system, const SolverOptions& options) {
  SolveResult result;
  const Eigen::Index nf = system.matrix.rows();
  if (nf == 0) {
    result.solution = merge(system, Eigen::VectorXd());
    return result;
  }
  Eigen::VectorXd x;
  if (options.kind == SolverKind::direct) {
    Eigen::SimplicialLLT<SparseMatrix> llt(system.matrix);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite("Cholesky factorization of the reduced stiffness matrix failed");
    x = llt.solve(system.rhs);
    // iterative refinement against the factorization
    result.relative_residual = residual_measure(system, x);
    const double target = system.rhs.norm() > 0 ? options.residual_target : 1e-13;
    for (int step = 0; step < options.max_refinement_steps && result.relative_residual > target;
         ++step) {
      x += llt.solve(system.rhs - system.matrix * x);
      result.relative_residual = residual_measure(system, x);
      result.iterations = step + 1;
    }
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.compute(system.matrix);
    const double bnorm = system.rhs.norm();
    if (bnorm == 0.0) {
      x = Eigen::VectorXd::Zero(nf);
    } else {
      cg.setTolerance(options.cg_tolerance / bnorm);
      cg.setMaxIterations(options.max_iterations);
      x = cg.solve(system.rhs);
      result.iterations = static_cast<int>(cg.iterations());
      if (cg.info() != Eigen::Success)
        throw NoConvergence("conjugate gradients did not reach the residual tolerance in " +
                            std::to_string(result.iterations) + " iterations");
    }
    result.relative_residual = residual_measure(system, x);
  }
  result.solution = merge(system, x);
  return result;
}

double min_eigenvalue(const GlobalSystem& system) {
  const Eigen::MatrixXd dense(system.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

} // namespace wgbih
