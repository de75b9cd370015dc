#pragma once

// Discrete weak Laplacian of weak functions {v0, vb, vn n_e} on a polygon T.
//
// For every test polynomial phi in P_r(T) the image w = Lap_w v in P_r(T)
// satisfies
//
//   (w, phi)_T = (v0, Lap phi)_T - <vb, grad phi . n>_dT + <vn sigma, phi>_dT
//
// with n the outward normal of T and sigma = n_e . n from the mesh.

#include <map>
#include <mutex>
#include <string>

#include <Eigen/Dense>

#include "wgbih/basis.hpp"
#include "wgbih/mesh.hpp"

namespace wgbih {

enum class RMode { nonconvex, convex, custom };

/// Degree r of the weak Laplacian for a cell with `num_edges` edges:
/// 2N + k - 2 (nonconvex), N + k - 2 (convex), or `custom_r` (checked >= k - 2).
int choose_r(int num_edges, int k, RMode mode, int custom_r = -1);

struct WeakDofLayout {
  int k = 2;
  int p = 2;
  int q = 1;
  RMode mode = RMode::nonconvex;
  int custom_r = -1;

  /// Defaults p = k, q = k - 1.
  static WeakDofLayout standard(int k, RMode mode = RMode::nonconvex, int custom_r = -1);

  /// Throws InvalidLayout / InvalidR.
  void validate() const;

  int r_for(int num_edges) const { return choose_r(num_edges, k, mode, custom_r); }
  int interior_size() const { return polynomial_dimension(k); }
  int trace_size() const { return p + 1; }
  int normal_size() const { return q + 1; }
  int edge_size() const { return trace_size() + normal_size(); }
  int local_size(int num_edges) const { return interior_size() + num_edges * edge_size(); }

  /// Local offsets: interior block first, then per edge (loop order) trace then normal.
  int trace_offset(int local_edge) const { return interior_size() + local_edge * edge_size(); }
  int normal_offset(int local_edge) const { return trace_offset(local_edge) + trace_size(); }
};

/// Quadrature exactness used for integrals involving non-polynomial data.
inline int data_exactness(int k, int r) { return std::max(2 * k + 6, 2 * r + 2); }

struct LocalWeakLaplacian {
  int r = 0;
  CellBasis test_basis;   // P_r(T)
  CellBasis trial_basis;  // P_k(T), the v0 space
  Eigen::MatrixXd matrix; // D_T, dim P_r x local DOFs
  Eigen::MatrixXd mass;   // M_r

  Eigen::VectorXd apply(const Eigen::VectorXd& local_dofs) const { return matrix * local_dofs; }
  /// ||Lap_w v||_T^2 for local DOFs v.
  double norm_squared(const Eigen::VectorXd& local_dofs) const;
};

/// Assembles D_T = M_r^{-1} [B_0 | B_b^e | B_n^e]. Throws SingularMass.
LocalWeakLaplacian build_local_weak_laplacian(const PolyMesh& mesh, int cell,
                                              const WeakDofLayout& layout);

/// P_r coefficients (in `op.test_basis`) of the weak Laplacian of the exact weak
/// function {u|_T, u|_dT, (grad u . n_e) n_e}, integrating the exact traces.
Eigen::VectorXd weak_laplacian_of_exact(const ScalarField& u, const VectorField& grad_u,
                                        const PolyMesh& mesh, int cell,
                                        const LocalWeakLaplacian& op, int exactness);

/// Local operators keyed by cell shape up to translation (plus edge signs and
/// the layout). Safe for concurrent use.
class LocalOperatorCache {
public:
  LocalWeakLaplacian get(const PolyMesh& mesh, int cell, const WeakDofLayout& layout);

  std::size_t hits() const;
  std::size_t misses() const;
  std::size_t size() const;

private:
  static std::string key(const PolyMesh& mesh, int cell, const WeakDofLayout& layout);

  mutable std::mutex mutex_;
  std::map<std::string, LocalWeakLaplacian> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

} // namespace wgbih
