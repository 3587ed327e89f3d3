#ifndef VEM_SYSTEM_HPP
#define VEM_SYSTEM_HPP

#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "vem/element.hpp"

namespace vem {

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Global velocity/pressure numbering, grouped by DoF kind: vertex values,
/// edge values, cell moments (complement then divergence for DivFree), and
/// for the pressure the per-cell constants followed by the higher moments.
/// The grouping makes the reduction literally an index-range deletion.
struct GlobalDofMap {
  ElementKind kind = ElementKind::DivFree;
  int k = 2;
  int n_cells = 0;
  int n_vertices = 0;
  int n_edges = 0;
  int offset_edge = 0;
  int offset_m3 = 0;  // complement moments (DivFree) / all moments (Classic)
  int offset_m4 = 0;  // divergence moments (DivFree only)
  int n_velocity = 0;
  int n_pressure = 0;
  std::vector<bool> boundary_dof;  // velocity DoFs on the domain boundary

  int vertex_dof(int v, int comp) const { return 2 * v + comp; }
  int edge_dof(int e, int slot, int comp) const {
    return offset_edge + 2 * (k - 1) * e + 2 * slot + comp;
  }
  int m3_dof(int cell, int j) const;
  int m4_dof(int cell, int g) const {
    return offset_m4 + (poly_dim(k - 1) - 1) * cell + g;
  }
  int pressure_p0(int cell) const { return cell; }
  int pressure_pperp(int cell, int g) const {
    return n_cells + (poly_dim(k - 1) - 1) * cell + g;
  }

  int n_interior_velocity() const;
  bool is_m4_dof(int g) const {
    return kind == ElementKind::DivFree && g >= offset_m4;
  }

  /// Global ids of one cell's local DoFs, in local layout order (handles
  /// the orientation of shared edge points).
  std::vector<int> cell_dofs(const PolyMesh& mesh, int cell) const;
};

GlobalDofMap number_dofs(const PolyMesh& mesh, int k, ElementKind kind);

/// Closed-form dimensions from the mesh counts (Eq.-level formulas).
struct SpaceDims {
  int velocity = 0;          // interior velocity DoFs
  int pressure = 0;          // pressure DoFs including the mean constraint
  int velocity_reduced = 0;  // without divergence moments
  int pressure_reduced = 0;  // one per cell, minus the mean constraint
};
SpaceDims space_dimensions(const PolyMesh& mesh, int k);

struct ProblemData {
  double nu = 1.0;
  VectorField body_force;
  VectorField dirichlet;  // trace of the velocity on the boundary
};

/// Assembled saddle-point system [A B'; B 0] bordered by the zero-mean
/// pressure constraint row/column. Dirichlet DoFs are eliminated into the
/// right-hand side; in the reduced variant the divergence-moment DoFs and
/// the non-constant pressure moments are deleted.
struct SaddleSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  int n_velocity = 0;  // free velocity unknowns
  int n_pressure = 0;
  bool reduced = false;
  std::vector<int> velocity_unknown;  // per global DoF; -1 if eliminated
  std::vector<int> pressure_unknown;  // per pressure DoF; -1 if deleted
  Eigen::VectorXd dirichlet_values;   // all velocity DoFs, boundary set
  std::vector<Eigen::VectorXd> cell_loads;

  int size() const { return n_velocity + n_pressure + 1; }
};

struct Solution {
  Eigen::VectorXd velocity;  // every velocity DoF (boundary data included)
  Eigen::VectorXd pressure;  // every orthonormal pressure coefficient
  double multiplier = 0.0;
  double residual = 0.0;
  int n_unknowns = 0;
  bool reduced = false;
  bool postprocessed = false;
};

/// Per-cell discretization of the Stokes problem on one mesh: cell bases,
/// local elements and the global numbering. Cells are built in parallel;
/// everything is immutable afterwards.
class StokesDiscretization {
 public:
  StokesDiscretization(const PolyMesh& mesh, int k, ElementKind kind,
                       double nu, ComplementMode mode = ComplementMode::Rotational,
                       int n_threads = 1);

  const PolyMesh& mesh() const { return *mesh_; }
  int k() const { return k_; }
  ElementKind kind() const { return kind_; }
  double nu() const { return nu_; }
  const GlobalDofMap& dofs() const { return dofs_; }
  const CellBasis& basis(int c) const { return *bases_[c]; }
  const LocalElement& element(int c) const { return elements_[c]; }

  SaddleSystem assemble(const ProblemData& data, bool reduced = false) const;

  /// Direct sparse solve with a residual check (<= 1e-10 enforced).
  Solution solve(const SaddleSystem& sys) const;

  Solution solve_full(const ProblemData& data) const;
  Solution solve_reduced(const ProblemData& data, bool postprocess) const;

  /// Recover the deleted pressure moments cell by cell from the removed
  /// block rows; fills sol.pressure with the full coefficient vector.
  void postprocess_pressure(const ProblemData& data, Solution& sol) const;

  /// Discrete energy seminorm sqrt(a_h(v, v)) of a velocity DoF vector.
  double energy_seminorm(const Eigen::VectorXd& velocity) const;
  double pressure_l2(const Eigen::VectorXd& pressure) const;

  /// Per-cell L2 norms of div u_h read from the divergence matrices.
  std::vector<double> divergence_norms(const Eigen::VectorXd& velocity) const;

  Eigen::VectorXd interpolate_velocity(const VectorField& u) const;
  Eigen::VectorXd interpolate_pressure(const ScalarField& p) const;

  /// Gather a cell's local velocity values from a global DoF vector.
  Eigen::VectorXd local_velocity(const Eigen::VectorXd& velocity,
                                 int cell) const;

 private:
  const PolyMesh* mesh_;
  int k_;
  ElementKind kind_;
  double nu_;
  GlobalDofMap dofs_;
  std::vector<std::unique_ptr<CellBasis>> bases_;
  std::vector<LocalElement> elements_;
  std::vector<std::vector<int>> cell_dofs_;
};

}  // namespace vem

#endif
