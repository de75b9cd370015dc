#pragma once

// Polynomial bases on cells and edges, mass matrices and L2 projections.
//
// Cell basis: orthonormal for the cell L2 inner product, built by a
// Stieltjes / Arnoldi recurrence in the bounding-box coordinates (xi, eta) in
// [-1, 1]^2. Each new function is xi or eta times an earlier one,
// orthogonalized twice against all previous ones. Evaluation replays the
// recurrence, which stays accurate for the large r of the weak Laplacian on
// non-convex cells where an explicit monomial or Legendre expansion would not.
// CellBasis::raw gives the plain Legendre products L_a(xi) L_b(eta).
//
// Edge basis: Legendre polynomials in the edge parameter s in [-1, 1],
// s = -1 at the first stored endpoint.

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "wgbih/mesh.hpp"
#include "wgbih/quadrature.hpp"

namespace wgbih {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Eigen::Vector2d(const Point&)>;

inline constexpr int kOrthonormalizeFrom = 1;

inline int polynomial_dimension(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Default exactness for mass matrices of degree-`degree` polynomials.
inline int mass_exactness(int degree) { return 2 * degree + 2; }

/// Values (and optionally first/second derivatives) of Legendre P_0..P_n at x.
void legendre_table(int n, double x, double* p, double* dp = nullptr, double* d2p = nullptr);

struct BasisTable {
  Eigen::MatrixXd values;  // dim x npts
  Eigen::MatrixXd dx;      // empty unless derivatives were requested
  Eigen::MatrixXd dy;
  Eigen::MatrixXd laplacian;
};

class CellBasis {
public:
  CellBasis() = default;

  /// Raw Legendre-product basis on the cell's bounding box.
  static CellBasis raw(const PolyMesh& mesh, int cell, int degree);

  /// Raw basis, orthonormalized when degree >= kOrthonormalizeFrom (or when forced).
  static CellBasis make(const PolyMesh& mesh, int cell, int degree, bool force_orthonormal = false);

  int degree() const { return degree_; }
  int dim() const { return polynomial_dimension(degree_); }
  const Point& center() const { return center_; }
  const Point& half_extent() const { return half_; }
  bool orthonormal() const { return recurrence_ != nullptr; }

  /// Same basis moved so that it is centred at `center` (for translated cells).
  CellBasis translated_to(const Point& center) const;

  Eigen::VectorXd values(const Point& x) const;
  BasisTable tabulate(const std::vector<Point>& points, bool derivatives) const;

  /// Evaluates sum_i coeffs_i phi_i and its gradient / Laplacian.
  double evaluate(const Eigen::VectorXd& coeffs, const Point& x) const;
  Eigen::Vector2d gradient(const Eigen::VectorXd& coeffs, const Point& x) const;

  /// Exponents (a, b) of the raw function with index i.
  static std::pair<int, int> exponents(int i);

private:
  struct Recurrence {
    std::vector<int> parent;    // phi_j = (t * phi_parent - sum_{i<j} h(i,j) phi_i) / h(j,j)
    std::vector<int> direction; // t = xi (0) or eta (1)
    Eigen::MatrixXd h;
  };

  BasisTable tabulate_raw(const std::vector<Point>& points, bool derivatives) const;
  BasisTable tabulate_recurrence(const std::vector<Point>& points, bool derivatives) const;

  int degree_ = 0;
  Point center_ = Point::Zero();
  Point half_ = Point::Ones();
  // shared between translated copies
  std::shared_ptr<const Recurrence> recurrence_;
};

class EdgeBasis {
public:
  EdgeBasis() = default;
  explicit EdgeBasis(int degree) : degree_(degree) {}

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }

  Eigen::VectorXd values(double s) const;
  /// dim x npts table at the rule's parameters.
  Eigen::MatrixXd tabulate(const QuadratureRule& rule) const;
  double evaluate(const Eigen::VectorXd& coeffs, double s) const;

private:
  int degree_ = 0;
};

Eigen::MatrixXd mass_matrix(const Eigen::MatrixXd& table, const QuadratureRule& rule);

/// Cell mass matrix at the default exactness 2*degree + 2 (or `exactness` if >= 0).
Eigen::MatrixXd cell_mass_matrix(const PolyMesh& mesh, int cell, const CellBasis& basis,
                                 int exactness = -1);
Eigen::MatrixXd edge_mass_matrix(const PolyMesh& mesh, int edge, const EdgeBasis& basis,
                                 int exactness = -1);

/// L2 projection onto the span of `basis` on the cell. Throws SingularMass.
Eigen::VectorXd project_cell(const ScalarField& f, const PolyMesh& mesh, int cell,
                             const CellBasis& basis, int exactness);
/// Convenience overload using CellBasis::make and exactness 2*degree + 6.
Eigen::VectorXd project_cell(const ScalarField& f, const PolyMesh& mesh, int cell, int degree);

Eigen::VectorXd project_edge(const ScalarField& f, const PolyMesh& mesh, int edge,
                             const EdgeBasis& basis, int exactness);
Eigen::VectorXd project_edge(const ScalarField& f, const PolyMesh& mesh, int edge, int degree);

/// Solves the SPD system mass * x = rhs, checking the relative residual.
Eigen::MatrixXd solve_mass(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& rhs,
                           double tolerance = 1e-12);

} // namespace wgbih
