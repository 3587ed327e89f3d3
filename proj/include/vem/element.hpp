#ifndef VEM_ELEMENT_HPP
#define VEM_ELEMENT_HPP

#include <Eigen/Dense>
#include <functional>

#include "vem/polybasis.hpp"

namespace vem {

using ScalarField = std::function<double(Point2)>;
using VectorField = std::function<Point2(Point2)>;

/// The divergence-preserving element with divergence-moment DoFs, and the
/// classical vector element with full polynomial moment DoFs. Both have
/// the same local dimension for equal (k, n_K).
enum class ElementKind { DivFree, Classic };

/// Local velocity DoF layout. Ordering: vertex values, edge values
/// (interior Gauss-Lobatto points, loop order), then the cell moments
/// (complement + divergence moments for DivFree, vector polynomial
/// moments for Classic).
struct DofLayout {
  ElementKind kind = ElementKind::DivFree;
  int k = 2;
  int n_edges = 0;

  int n_vertex_dofs() const { return 2 * n_edges; }
  int n_edge_dofs() const { return 2 * n_edges * (k - 1); }
  int n_boundary_dofs() const { return n_vertex_dofs() + n_edge_dofs(); }
  int n_gperp() const { return (k - 1) * (k - 2) / 2; }
  int n_div() const { return poly_dim(k - 1) - 1; }
  int n_moments() const {
    return kind == ElementKind::DivFree ? n_gperp() + n_div()
                                        : 2 * poly_dim(k - 2);
  }
  int total() const { return n_boundary_dofs() + n_moments(); }

  int vertex_dof(int v, int comp) const { return 2 * v + comp; }
  int edge_dof(int e, int j, int comp) const {
    return n_vertex_dofs() + 2 * (k - 1) * e + 2 * j + comp;
  }
  /// DivFree: moment against the j-th complement basis field.
  int gperp_dof(int j) const { return n_boundary_dofs() + j; }
  /// DivFree: moment of the divergence against mhat_{g+1}.
  int div_dof(int g) const { return n_boundary_dofs() + n_gperp() + g; }
  /// Classic: normalized moment against m_j e_comp.
  int moment_dof(int comp, int j) const {
    return n_boundary_dofs() + comp * poly_dim(k - 2) + j;
  }
};

DofLayout make_dof_layout(ElementKind kind, int k, int n_edges);

/// Computable local matrices of one cell.
///
/// D    : DoFs of the vector monomial basis of [P_k]^2 (stacked x/y)
/// G    : a^K on that polynomial basis
/// B    : a^K(basis poly, canonical virtual function)
/// proj : energy projection DoFs -> polynomial coefficients
/// stiffness : a_h^K = proj' G proj + nu (I - D proj)'(I - D proj)
/// divmat   : b^K rows against the orthonormal P_{k-1} basis
/// moments  : integrals of canonical functions against [P_{k-2}]^2
/// pi0      : coefficients of the Pi^0_{k-2} projection of each function
struct LocalElement {
  ElementKind kind = ElementKind::DivFree;
  int k = 2;
  double nu = 1.0;
  DofLayout layout;
  Eigen::MatrixXd D;
  Eigen::MatrixXd G;
  Eigen::MatrixXd B;
  Eigen::MatrixXd proj;
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd divmat;
  Eigen::MatrixXd moments;
  Eigen::MatrixXd pi0;

  /// Load vector (f_h, phi_i) = (f, Pi^0_{k-2} phi_i) by quadrature of f.
  Eigen::VectorXd load(const CellBasis& cb, const VectorField& f) const;
};

LocalElement build_local_element(const CellBasis& cb, ElementKind kind,
                                 double nu);

/// DoFs of an analytic velocity field (D_V(u^I) = D_V(u)); divergence
/// moments are taken by parts so no derivatives of u are required.
Eigen::VectorXd interpolate_velocity_dofs(const CellBasis& cb,
                                          ElementKind kind,
                                          const VectorField& u);

/// Orthonormal-basis coefficients of the moment interpolant of p.
Eigen::VectorXd interpolate_pressure_coeffs(const CellBasis& cb,
                                            const ScalarField& p);

/// DoFs of a vector polynomial given by stacked monomial coefficients of
/// degree <= k. Exact (uses the D matrix path).
Eigen::VectorXd polynomial_dofs(const LocalElement& el,
                                const Eigen::VectorXd& stacked_coeffs);

}  // namespace vem

#endif
