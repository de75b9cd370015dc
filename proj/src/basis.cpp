#include "wgbih/basis.hpp"

#include <cmath>
#include <vector>

#include "wgbih/errors.hpp"

namespace wgbih {

void legendre_table(int n, double x, double* p, double* dp, double* d2p) {
  p[0] = 1.0;
  if (dp) dp[0] = 0.0;
  if (d2p) d2p[0] = 0.0;
  if (n == 0) return;
  p[1] = x;
  if (dp) dp[1] = 1.0;
  if (d2p) d2p[1] = 0.0;
  for (int j = 1; j < n; ++j) {
    p[j + 1] = ((2 * j + 1) * x * p[j] - j * p[j - 1]) / (j + 1);
    // P'_{j+1} = P'_{j-1} + (2j+1) P_j, differentiated once more for P''
    if (dp) dp[j + 1] = dp[j - 1] + (2 * j + 1) * p[j];
    if (d2p) d2p[j + 1] = d2p[j - 1] + (2 * j + 1) * dp[j];
  }
}

std::pair<int, int> CellBasis::exponents(int i) {
  int d = 0;
  while (polynomial_dimension(d) <= i) ++d;
  const int offset = i - (d == 0 ? 0 : polynomial_dimension(d - 1));
  return {d - offset, offset};
}

CellBasis CellBasis::raw(const PolyMesh& mesh, int cell, int degree) {
  if (degree < 0) throw UnsupportedDegree("negative polynomial degree");
  const Cell& c = mesh.cell(cell);
  CellBasis b;
  b.degree_ = degree;
  b.center_ = 0.5 * (c.bbox_min + c.bbox_max);
  b.half_ = 0.5 * (c.bbox_max - c.bbox_min);
  return b;
}

CellBasis CellBasis::make(const PolyMesh& mesh, int cell, int degree, bool force_orthonormal) {
  CellBasis b = raw(mesh, cell, degree);
  if (degree < kOrthonormalizeFrom && !force_orthonormal) return b;

  const auto rule = cell_quadrature(mesh, cell, mass_exactness(degree));
  const int n = b.dim();
  const int np = static_cast<int>(rule.size());
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), np);
  Eigen::RowVectorXd t[2] = {Eigen::RowVectorXd(np), Eigen::RowVectorXd(np)};
  for (int q = 0; q < np; ++q) {
    t[0][q] = (rule.points[q].x() - b.center_.x()) / b.half_.x();
    t[1][q] = (rule.points[q].y() - b.center_.y()) / b.half_.y();
  }

  auto rec = std::make_shared<Recurrence>();
  rec->parent.assign(n, -1);
  rec->direction.assign(n, 0);
  rec->h = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd v(n, np);
  for (int j = 0; j < n; ++j) {
    Eigen::RowVectorXd u = Eigen::RowVectorXd::Ones(np);
    if (j > 0) {
      const auto [ea, eb] = exponents(j);
      const int d = ea + eb;
      const int dir = ea > 0 ? 0 : 1;
      const int pa = dir == 0 ? ea - 1 : ea;
      rec->parent[j] = polynomial_dimension(d - 2) + (d - 1 - pa);
      if (d == 1) rec->parent[j] = 0;
      rec->direction[j] = dir;
      u = t[dir].cwiseProduct(v.row(rec->parent[j]));
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = v.topRows(j) * w.asDiagonal() * u.transpose();
        u -= c.transpose() * v.topRows(j);
        rec->h.col(j).head(j) += c;
      }
    }
    const double norm = std::sqrt(u.cwiseAbs2().dot(w.transpose()));
    if (!(norm > 0.0))
      throw SingularMass("cell " + std::to_string(cell) + ": basis of degree " +
                         std::to_string(degree) + " degenerates");
    rec->h(j, j) = norm;
    v.row(j) = u / norm;
  }
  b.recurrence_ = std::move(rec);
  return b;
}

BasisTable CellBasis::tabulate_recurrence(const std::vector<Point>& points, bool derivatives) const {
  const auto& rec = *recurrence_;
  const int n = dim();
  const int np = static_cast<int>(points.size());
  const double s[2] = {1.0 / half_.x(), 1.0 / half_.y()};
  Eigen::RowVectorXd t[2] = {Eigen::RowVectorXd(np), Eigen::RowVectorXd(np)};
  for (int q = 0; q < np; ++q) {
    t[0][q] = (points[q].x() - center_.x()) * s[0];
    t[1][q] = (points[q].y() - center_.y()) * s[1];
  }
  BasisTable out;
  out.values.resize(n, np);
  if (derivatives) {
    out.dx.resize(n, np);
    out.dy.resize(n, np);
    out.laplacian.resize(n, np);
  }
  for (int j = 0; j < n; ++j) {
    const double hjj = rec.h(j, j);
    if (j == 0) {
      out.values.row(0).setConstant(1.0 / hjj);
      if (derivatives) {
        out.dx.row(0).setZero();
        out.dy.row(0).setZero();
        out.laplacian.row(0).setZero();
      }
      continue;
    }
    const int p = rec.parent[j];
    const int dir = rec.direction[j];
    const auto hc = rec.h.col(j).head(j).transpose();
    out.values.row(j) =
        (t[dir].cwiseProduct(out.values.row(p)) - hc * out.values.topRows(j)) / hjj;
    if (derivatives) {
      // t is linear: d(t f) = t df + f dt, Lap(t f) = t Lap f + 2 grad t . grad f
      Eigen::RowVectorXd dx = t[dir].cwiseProduct(out.dx.row(p));
      Eigen::RowVectorXd dy = t[dir].cwiseProduct(out.dy.row(p));
      Eigen::RowVectorXd lap = t[dir].cwiseProduct(out.laplacian.row(p));
      if (dir == 0) {
        dx += s[0] * out.values.row(p);
        lap += 2.0 * s[0] * out.dx.row(p);
      } else {
        dy += s[1] * out.values.row(p);
        lap += 2.0 * s[1] * out.dy.row(p);
      }
      out.dx.row(j) = (dx - hc * out.dx.topRows(j)) / hjj;
      out.dy.row(j) = (dy - hc * out.dy.topRows(j)) / hjj;
      out.laplacian.row(j) = (lap - hc * out.laplacian.topRows(j)) / hjj;
    }
  }
  return out;
}

CellBasis CellBasis::translated_to(const Point& center) const {
  CellBasis b = *this;
  b.center_ = center;
  return b;
}

BasisTable CellBasis::tabulate_raw(const std::vector<Point>& points, bool derivatives) const {
  const int n = dim();
  const int np = static_cast<int>(points.size());
  BasisTable t;
  t.values.resize(n, np);
  if (derivatives) {
    t.dx.resize(n, np);
    t.dy.resize(n, np);
    t.laplacian.resize(n, np);
  }
  std::vector<double> px(degree_ + 1), dpx(degree_ + 1), d2px(degree_ + 1);
  std::vector<double> py(degree_ + 1), dpy(degree_ + 1), d2py(degree_ + 1);
  const double sx = 1.0 / half_.x();
  const double sy = 1.0 / half_.y();
  for (int q = 0; q < np; ++q) {
    const double xi = (points[q].x() - center_.x()) * sx;
    const double eta = (points[q].y() - center_.y()) * sy;
    if (derivatives) {
      legendre_table(degree_, xi, px.data(), dpx.data(), d2px.data());
      legendre_table(degree_, eta, py.data(), dpy.data(), d2py.data());
    } else {
      legendre_table(degree_, xi, px.data());
      legendre_table(degree_, eta, py.data());
    }
    int i = 0;
    for (int d = 0; d <= degree_; ++d) {
      for (int a = d; a >= 0; --a, ++i) {
        const int b = d - a;
        t.values(i, q) = px[a] * py[b];
        if (derivatives) {
          t.dx(i, q) = dpx[a] * py[b] * sx;
          t.dy(i, q) = px[a] * dpy[b] * sy;
          t.laplacian(i, q) = d2px[a] * py[b] * sx * sx + px[a] * d2py[b] * sy * sy;
        }
      }
    }
  }
  return t;
}

BasisTable CellBasis::tabulate(const std::vector<Point>& points, bool derivatives) const {
  return recurrence_ ? tabulate_recurrence(points, derivatives) : tabulate_raw(points, derivatives);
}

Eigen::VectorXd CellBasis::values(const Point& x) const {
  return tabulate({x}, false).values.col(0);
}

double CellBasis::evaluate(const Eigen::VectorXd& coeffs, const Point& x) const {
  return coeffs.dot(values(x));
}

Eigen::Vector2d CellBasis::gradient(const Eigen::VectorXd& coeffs, const Point& x) const {
  const auto t = tabulate({x}, true);
  return {coeffs.dot(t.dx.col(0)), coeffs.dot(t.dy.col(0))};
}

Eigen::VectorXd EdgeBasis::values(double s) const {
  Eigen::VectorXd v(dim());
  legendre_table(degree_, s, v.data());
  return v;
}

Eigen::MatrixXd EdgeBasis::tabulate(const QuadratureRule& rule) const {
  Eigen::MatrixXd t(dim(), static_cast<Eigen::Index>(rule.size()));
  for (std::size_t q = 0; q < rule.size(); ++q) t.col(q) = values(rule.params[q]);
  return t;
}

double EdgeBasis::evaluate(const Eigen::VectorXd& coeffs, double s) const {
  return coeffs.dot(values(s));
}

Eigen::MatrixXd mass_matrix(const Eigen::MatrixXd& table, const QuadratureRule& rule) {
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(),
                                            static_cast<Eigen::Index>(rule.weights.size()));
  Eigen::MatrixXd m = table * w.asDiagonal() * table.transpose();
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd cell_mass_matrix(const PolyMesh& mesh, int cell, const CellBasis& basis,
                                 int exactness) {
  const auto rule =
      cell_quadrature(mesh, cell, exactness >= 0 ? exactness : mass_exactness(basis.degree()));
  return mass_matrix(basis.tabulate(rule.points, false).values, rule);
}

Eigen::MatrixXd edge_mass_matrix(const PolyMesh& mesh, int edge, const EdgeBasis& basis,
                                 int exactness) {
  const auto rule =
      edge_quadrature(mesh, edge, exactness >= 0 ? exactness : mass_exactness(basis.degree()));
  return mass_matrix(basis.tabulate(rule), rule);
}

Eigen::MatrixXd solve_mass(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& rhs,
                           double tolerance) {
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success) throw SingularMass("mass matrix factorization failed");
  Eigen::MatrixXd x = llt.solve(rhs);
  const double scale = rhs.norm();
  if (scale > 0) {
    const double residual = (mass * x - rhs).norm() / scale;
    if (!(residual <= tolerance))
      throw SingularMass("mass solve residual " + std::to_string(residual) +
                         " exceeds tolerance");
  }
  return x;
}

Eigen::VectorXd project_cell(const ScalarField& f, const PolyMesh& mesh, int cell,
                             const CellBasis& basis, int exactness) {
  const auto rule = cell_quadrature(mesh, cell, std::max(exactness, mass_exactness(basis.degree())));
  const Eigen::MatrixXd vals = basis.tabulate(rule.points, false).values;
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(basis.dim());
  for (std::size_t q = 0; q < rule.size(); ++q)
    moments += rule.weights[q] * f(rule.points[q]) * vals.col(q);
  return solve_mass(mass_matrix(vals, rule), moments);
}

Eigen::VectorXd project_cell(const ScalarField& f, const PolyMesh& mesh, int cell, int degree) {
  return project_cell(f, mesh, cell, CellBasis::make(mesh, cell, degree), 2 * degree + 6);
}

Eigen::VectorXd project_edge(const ScalarField& f, const PolyMesh& mesh, int edge,
                             const EdgeBasis& basis, int exactness) {
  const auto rule = edge_quadrature(mesh, edge, std::max(exactness, mass_exactness(basis.degree())));
  const Eigen::MatrixXd vals = basis.tabulate(rule);
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(basis.dim());
  for (std::size_t q = 0; q < rule.size(); ++q)
    moments += rule.weights[q] * f(rule.points[q]) * vals.col(q);
  return solve_mass(mass_matrix(vals, rule), moments);
}

Eigen::VectorXd project_edge(const ScalarField& f, const PolyMesh& mesh, int edge, int degree) {
  return project_edge(f, mesh, edge, EdgeBasis(degree), 2 * degree + 6);
}

} // namespace wgbih
