#ifndef VEM_POLYBASIS_HPP
#define VEM_POLYBASIS_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "vem/mesh.hpp"
#include "vem/quadrature.hpp"

namespace vem {

/// Dimension of the total-degree-s polynomial space in 2D.
inline int poly_dim(int s) { return s < 0 ? 0 : (s + 1) * (s + 2) / 2; }

struct MultiIndex {
  int ax = 0;
  int ay = 0;
  int total() const { return ax + ay; }
};

/// Enumeration of multi-indices ordered by total degree, then by
/// descending x-exponent: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
const std::vector<MultiIndex>& monomial_exponents(int s);

/// Position of (ax, ay) in the enumeration above.
inline int monomial_index(int ax, int ay) {
  const int t = ax + ay;
  return t * (t + 1) / 2 + ay;
}

/// Choice of complement in [P_{k-2}]^2 = grad(P_{k-1}) + complement.
enum class ComplementMode {
  Rotational,  // span{ xperp m_beta }, xperp = (y - y_K, -(x - x_K))/h_K
  Orthogonal,  // L^2(K)-orthogonal complement of the gradients
};

/// Basis matrices of the splitting of [P_{k-2}(K)]^2, in the stacked
/// vector-monomial coordinates (x-components first, then y-components).
struct GradSplit {
  ComplementMode mode = ComplementMode::Rotational;
  Eigen::MatrixXd grad_basis;  // 2*np(k-2) x (np(k-1) - 1)
  Eigen::MatrixXd comp_basis;  // 2*np(k-2) x (k-1)(k-2)/2
};

/// Per-cell polynomial context: scaled monomials m_a centered at the
/// centroid with diameter scaling, a quadrature rule of exactness 2k+2,
/// mass matrices, the L^2-orthonormal basis of P_{k-1}(K) and the
/// gradient/complement splitting of [P_{k-2}(K)]^2.
///
/// All members are immutable after construction; instances for different
/// cells are independent.
class CellBasis {
 public:
  CellBasis(const PolyMesh& mesh, int cell, int k, ComplementMode mode);
  CellBasis(Polygon polygon, int k, ComplementMode mode);

  int degree() const { return k_; }
  double area() const { return area_; }
  double diameter() const { return h_; }
  const Point2& centroid() const { return centroid_; }
  const Polygon& polygon() const { return polygon_; }
  const Point2& star_center() const { return star_center_; }
  const QuadratureRule& quad() const { return quad_; }
  const GradSplit& split() const { return split_; }

  /// Scaled monomial value, gradient and Laplacian at a point.
  double monomial(int idx, const Point2& p) const;
  Point2 monomial_gradient(int idx, const Point2& p) const;

  /// Value of the polynomial with the given monomial coefficients.
  double evaluate(const Eigen::VectorXd& coeffs, const Point2& p) const;

  /// Mass matrix of the scaled monomials up to degree s <= k.
  Eigen::MatrixXd mass_matrix(int s) const;
  const Eigen::MatrixXd& mass() const { return mass_; }

  /// Integrals of the scaled monomials, |a| <= k.
  double monomial_integral(int idx) const { return mass_(0, idx); }

  /// Coefficients of the L^2(K)-orthonormal basis of P_{k-1}(K) over the
  /// scaled monomials: row g of the matrix gives mhat_g. The first element
  /// is the normalized constant, so mhat_g has zero mean for g >= 1.
  const Eigen::MatrixXd& orthonormal_coeffs() const { return ortho_; }

  /// Monomial coefficients (degree k-1) -> orthonormal coefficients.
  Eigen::VectorXd to_orthonormal(const Eigen::VectorXd& mono) const;

  /// Split a vector polynomial of degree <= k-2 (stacked coefficients)
  /// into q = grad(q_{k-1}) + g_comp. Returns the monomial coefficients of
  /// q_{k-1} in P_{k-1}(K) normalized to zero mean, and the coefficients
  /// of the complement part over split().comp_basis.
  void decompose_vector_poly(const Eigen::VectorXd& stacked,
                             Eigen::VectorXd& q_km1,
                             Eigen::VectorXd& comp) const;

  /// L^2(K) projection onto P_s(K), s <= k; returns monomial coefficients.
  Eigen::VectorXd l2_project(const std::function<double(Point2)>& f,
                             int s) const;

  /// Gauss-Lobatto boundary data of one local edge: mapped points,
  /// weights (including the |e|/2 factor) and the outward unit normal.
  struct EdgeData {
    std::vector<Point2> points;  // k+1 Gauss-Lobatto points, loop order
    std::vector<double> weights;
    Point2 normal;
    double length = 0.0;
  };
  const std::vector<EdgeData>& edge_data() const { return edges_; }

 private:
  void build();

  int k_;
  Polygon polygon_;
  double area_ = 0.0;
  double h_ = 0.0;
  Point2 centroid_;
  Point2 star_center_;
  QuadratureRule quad_;
  Eigen::MatrixXd values_;  // quad points x np(k)
  Eigen::MatrixXd mass_;    // np(k) x np(k)
  Eigen::MatrixXd ortho_;   // np(k-1) x np(k-1), rows = orthonormal basis
  Eigen::MatrixXd ortho_lt_;  // transpose of the Cholesky factor of mass
  GradSplit split_;
  Eigen::PartialPivLU<Eigen::MatrixXd> split_lu_;
  std::vector<EdgeData> edges_;
};

}  // namespace vem

#endif
