#pragma once

// Global assembly and solution of the stabilizer-free weak Galerkin scheme
//
//   find u_h with u_b = Q_b xi, u_n sigma = Q_n nu on the boundary and
//   sum_T (Lap_w u_h, Lap_w v)_T = sum_T (f, v0)_T   for all v in V_h^0.
//
// Boundary DOFs are eliminated (their columns moved to the right-hand side);
// the reduced matrix is symmetric positive definite.

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wgbih/dofs.hpp"

namespace wgbih {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// K_T = D_T^T M_r D_T.
Eigen::MatrixXd local_stiffness(const LocalWeakLaplacian& op);

/// Prescribed values of the boundary DOFs; entries of free DOFs are zero.
struct BoundaryValues {
  Eigen::VectorXd values;
};

struct EdgeBoundaryData {
  Eigen::VectorXd trace;  // Q_b xi
  Eigen::VectorXd normal; // stored v_n coefficients, sigma * Q_n nu
};

/// Normal-derivative data nu(x, n) at boundary point x with outward normal n.
using NormalData = std::function<double(const Point&, const Point&)>;

/// Boundary DOFs of the edge a -> b (parameter s = -1 at a) with stored normal
/// n_e, seen from the adjacent cell with sign sigma = n_e . n.
EdgeBoundaryData boundary_edge_values(const Point& a, const Point& b, const Point& normal,
                                      int sigma, const EdgeBasis& trace_basis,
                                      const EdgeBasis& normal_basis, const ScalarField& xi,
                                      const NormalData& nu, int exactness);

/// xi: Dirichlet trace, nu: outward normal derivative on the domain boundary.
BoundaryValues impose_boundary(const WeakSpace& space, const ScalarField& xi, const NormalData& nu);
BoundaryValues homogeneous_boundary(const WeakSpace& space);

struct GlobalSystem {
  SparseMatrix matrix;            // free x free
  Eigen::VectorXd rhs;            // free
  std::vector<int> free_dofs;
  std::vector<int> constrained_dofs;
  Eigen::VectorXd constrained_values; // full length
  int total_dofs = 0;
};

/// Stiffness and load over all DOFs (no boundary elimination).
void assemble_full(const WeakSpace& space, const ScalarField& f, SparseMatrix& matrix,
                   Eigen::VectorXd& load);

GlobalSystem assemble(const WeakSpace& space, const ScalarField& f, const BoundaryValues& bc);

enum class SolverKind { direct, cg };

struct SolverOptions {
  SolverKind kind = SolverKind::direct;
  /// Target relative residual ||Ax - b|| / ||b|| (absolute when b = 0).
  double residual_target = 1e-11;
  /// Conjugate gradients: absolute residual tolerance and iteration cap.
  double cg_tolerance = 1e-13;
  int max_iterations = 100000;
  int max_refinement_steps = 5;
};

struct SolveResult {
  WeakDofVector solution;     // full layout, boundary entries set
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Throws NotPositiveDefinite (direct) or NoConvergence.
SolveResult solve(const GlobalSystem& system, const SolverOptions& options = {});

/// Smallest eigenvalue of the reduced matrix, by dense eigen-decomposition.
double min_eigenvalue(const GlobalSystem& system);

} // namespace wgbih
