#pragma once

// Global numbering of weak DOFs and the per-cell discrete space.
//
// Global order: all cell interior blocks (dim P_k each), then every edge's
// trace block (p+1) followed by its normal block (q+1). Normal DOFs are
// coefficients of v_n, the derivative along the fixed global normal n_e.

#include <vector>

#include <Eigen/Dense>

#include "wgbih/basis.hpp"
#include "wgbih/mesh.hpp"
#include "wgbih/weak_laplacian.hpp"

namespace wgbih {

using WeakDofVector = Eigen::VectorXd;

class DofMap {
public:
  DofMap(const PolyMesh& mesh, const WeakDofLayout& layout);

  int size() const { return size_; }
  int cell_offset(int cell) const { return cell * layout_.interior_size(); }
  int trace_offset(int edge) const { return edge_base_ + edge * layout_.edge_size(); }
  int normal_offset(int edge) const { return trace_offset(edge) + layout_.trace_size(); }

  /// Global indices of a cell's local DOFs in local order.
  const std::vector<int>& local_to_global(int cell) const { return cell_dofs_[cell]; }
  /// True for trace/normal DOFs on boundary edges.
  bool is_boundary(int dof) const { return boundary_[dof]; }
  int num_boundary() const { return num_boundary_; }

  const WeakDofLayout& layout() const { return layout_; }

private:
  WeakDofLayout layout_;
  int edge_base_ = 0;
  int size_ = 0;
  int num_boundary_ = 0;
  std::vector<std::vector<int>> cell_dofs_;
  std::vector<bool> boundary_;
};

/// Mesh + layout + DOF numbering + local weak Laplacians of all cells.
class WeakSpace {
public:
  WeakSpace(const PolyMesh& mesh, const WeakDofLayout& layout, LocalOperatorCache* cache = nullptr);

  const PolyMesh& mesh() const { return *mesh_; }
  const WeakDofLayout& layout() const { return dofs_.layout(); }
  const DofMap& dofs() const { return dofs_; }
  const LocalWeakLaplacian& local(int cell) const { return locals_[cell]; }
  const EdgeBasis& trace_basis() const { return trace_basis_; }
  const EdgeBasis& normal_basis() const { return normal_basis_; }

  Eigen::VectorXd gather(int cell, const WeakDofVector& v) const;

private:
  const PolyMesh* mesh_;
  DofMap dofs_;
  std::vector<LocalWeakLaplacian> locals_;
  EdgeBasis trace_basis_;
  EdgeBasis normal_basis_;
};

/// Q_h u = {Q_0 u, Q_b u, Q_n (grad u . n_e)} over the whole mesh.
WeakDofVector inject_Qh(const ScalarField& u, const VectorField& grad_u, const WeakSpace& space);

/// Local DOFs of Q_h u on a single cell, in local order.
Eigen::VectorXd inject_Qh_local(const ScalarField& u, const VectorField& grad_u,
                                const WeakSpace& space, int cell);

} // namespace wgbih
