#pragma once

// Error measures, the consistency functional of the error equation, manufactured
// solutions, and numerical probes of the stability machinery (norm
// equivalence, bubble functions).

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgbih/dofs.hpp"
#include "wgbih/solver.hpp"

namespace wgbih {

struct ManufacturedSolution {
  std::string name;
  ScalarField u;
  VectorField grad;
  ScalarField laplacian;
  VectorField grad_laplacian;
  ScalarField f;  // bilaplacian of u
  ScalarField xi; // u on the boundary
  NormalData nu;  // grad u . n on the boundary
  int smoothness = 0; // Sobolev order available (large for analytic u)
};

/// u = sin(pi x) sin(pi y) on the unit square.
ManufacturedSolution manufactured_trig();

/// u = x^2 + y^2 for k = 2; u = x^2 + y^2 + ((x + 2y)/3)^k for k >= 3.
ManufacturedSolution manufactured_poly(int k);

/// Zero solution with zero data.
ManufacturedSolution manufactured_zero();

/// |||u - u_h|||, computed as sqrt(sum_T ||Q_r Lap u - Lap_w u_h||_T^2).
double energy_error(const WeakSpace& space, const ManufacturedSolution& sol,
                    const WeakDofVector& uh);

/// Same quantity with Lap_w u evaluated by weak_laplacian_of_exact on every cell.
double energy_error_exact_traces(const WeakSpace& space, const ManufacturedSolution& sol,
                                 const WeakDofVector& uh);

/// |||v||| = (sum_T ||Lap_w v||_T^2)^(1/2).
double energy_norm(const WeakSpace& space, const WeakDofVector& v);

/// Squared contribution of one cell to the discrete H^2 semi-norm.
double discrete_h2_local(const WeakSpace& space, int cell, const Eigen::VectorXd& local);
double discrete_h2_norm(const WeakSpace& space, const WeakDofVector& v);

/// ||u - u0|| over the mesh.
double l2_error(const WeakSpace& space, const ManufacturedSolution& sol, const WeakDofVector& uh);

/// Consistency functional of the error equation. Throws BoundaryNotZero when v
/// has non-zero boundary DOFs.
double residual_functional_ell(const WeakSpace& space, const ManufacturedSolution& sol,
                               const WeakDofVector& v);

/// (Lap_w (u - u_h), Lap_w v), with Lap_w u from exact traces on each cell.
double error_equation_lhs(const WeakSpace& space, const ManufacturedSolution& sol,
                          const WeakDofVector& uh, const WeakDofVector& v);

/// max over cells of ||Lap_w u - Q_r Lap u||_T / ||Q_r Lap u||_T, with Lap_w u
/// from exact traces.
double commuting_identity_residual(const WeakSpace& space, const ManufacturedSolution& sol);

struct ErrorReport {
  double h = 0.0;
  int ndof = 0;
  double energy = 0.0;
  double h2 = 0.0;
  double l2 = 0.0;
};

ErrorReport error_report(const WeakSpace& space, const ManufacturedSolution& sol,
                         const WeakDofVector& uh);

/// log(e_coarse / e_fine) / log(h_coarse / h_fine).
double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine);

struct NormEquivalence {
  double c_min = 0.0; // min |||v|||_T / ||v||_{2,h,T}
  double c_max = 0.0;
  /// max ||Lap v0||_T / ||Lap_w v||_T over the same samples.
  double max_laplacian_ratio = 0.0;
  int samples = 0;
};

/// Random local weak functions (standard normal DOFs, consistent affine part
/// removed) on one cell; ratios of the two local norms.
NormEquivalence verify_norm_equivalence(const PolyMesh& mesh, int cell, const WeakDofLayout& layout,
                                        int trials, std::uint64_t seed = 20240601);

/// Local DOFs of the consistent affine weak functions 1, x, y on a cell.
Eigen::MatrixXd affine_kernel(const WeakSpace& space, int cell);

/// Element and edge bubble functions built from the edge lines
/// l_i(x) = (x - A_i) . n_i / h_T.
class BubbleFunction {
public:
  BubbleFunction(const PolyMesh& mesh, int cell);

  int num_edges() const { return static_cast<int>(anchors_.size()); }
  double line(int i, const Point& x) const;

  /// Phi_B = scale * prod_i l_i^2, equal to 1 at normalization_point().
  double element(const Point& x) const;
  /// phi_{e_k} = prod_{i != k} l_i^2 (unscaled).
  double edge(int k, const Point& x) const;

  const Point& normalization_point() const { return normalization_point_; }

  /// Disc around the normalization point free of the lines' zero sets, and the
  /// sampled minimum of Phi_B on it.
  double rho0() const { return rho0_; }
  double rho0_radius() const { return rho0_radius_; }

  /// Per edge: parameter sub-interval [s0, s1] of the edge (s in [0, 1]) on
  /// which phi_{e_k} stays above rho1(k).
  double rho1(int k) const { return rho1_[k]; }
  std::pair<double, double> rho1_interval(int k) const { return rho1_interval_[k]; }

private:
  double h_;
  std::vector<Point> anchors_;
  std::vector<Point> normals_;
  std::vector<std::pair<Point, Point>> segments_;
  double scale_ = 1.0;
  Point normalization_point_ = Point::Zero();
  double rho0_ = 0.0;
  double rho0_radius_ = 0.0;
  std::vector<double> rho1_;
  std::vector<std::pair<double, double>> rho1_interval_;
};

} // namespace wgbih
