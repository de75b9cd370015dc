#include "wgbih/dofs.hpp"

namespace wgbih {

DofMap::DofMap(const PolyMesh& mesh, const WeakDofLayout& layout) : layout_(layout) {
  layout_.validate();
  edge_base_ = mesh.num_cells() * layout_.interior_size();
  size_ = edge_base_ + mesh.num_edges() * layout_.edge_size();
  boundary_.assign(size_, false);
  for (int e : mesh.boundary_edges())
    for (int i = 0; i < layout_.edge_size(); ++i) boundary_[trace_offset(e) + i] = true;
  num_boundary_ = static_cast<int>(mesh.boundary_edges().size()) * layout_.edge_size();

  cell_dofs_.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cell(c);
    auto& dofs = cell_dofs_[c];
    dofs.reserve(layout_.local_size(cell.num_edges()));
    for (int i = 0; i < layout_.interior_size(); ++i) dofs.push_back(cell_offset(c) + i);
    for (const auto& inc : cell.edges)
      for (int i = 0; i < layout_.edge_size(); ++i) dofs.push_back(trace_offset(inc.edge) + i);
  }
}

WeakSpace::WeakSpace(const PolyMesh& mesh, const WeakDofLayout& layout, LocalOperatorCache* cache)
    : mesh_(&mesh), dofs_(mesh, layout), trace_basis_(layout.p), normal_basis_(layout.q) {
  LocalOperatorCache local_cache;
  if (!cache) cache = &local_cache;
  locals_.reserve(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) locals_.push_back(cache->get(mesh, c, layout));
}

Eigen::VectorXd WeakSpace::gather(int cell, const WeakDofVector& v) const {
  const auto& idx = dofs_.local_to_global(cell);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

Eigen::VectorXd inject_Qh_local(const ScalarField& u, const VectorField& grad_u,
                                const WeakSpace& space, int cell) {
  const auto& layout = space.layout();
  const auto& mesh = space.mesh();
  const Cell& c = mesh.cell(cell);
  const int exactness = data_exactness(layout.k, 0);
  Eigen::VectorXd out(layout.local_size(c.num_edges()));
  out.head(layout.interior_size()) =
      project_cell(u, mesh, cell, space.local(cell).trial_basis, exactness);
  for (int le = 0; le < c.num_edges(); ++le) {
    const int e = c.edges[le].edge;
    const Point ne = mesh.edge(e).normal;
    out.segment(layout.trace_offset(le), layout.trace_size()) =
        project_edge(u, mesh, e, space.trace_basis(), exactness);
    out.segment(layout.normal_offset(le), layout.normal_size()) = project_edge(
        [&](const Point& x) { return grad_u(x).dot(ne); }, mesh, e, space.normal_basis(),
        exactness);
  }
  return out;
}

WeakDofVector inject_Qh(const ScalarField& u, const VectorField& grad_u, const WeakSpace& space) {
  WeakDofVector v = WeakDofVector::Zero(space.dofs().size());
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const Eigen::VectorXd local = inject_Qh_local(u, grad_u, space, c);
    const auto& idx = space.dofs().local_to_global(c);
    for (std::size_t i = 0; i < idx.size(); ++i) v[idx[i]] = local[i];
  }
  return v;
}

} // namespace wgbih
