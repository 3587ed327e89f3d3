#ifndef VEM_HARNESS_HPP
#define VEM_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vem/system.hpp"

namespace vem {

/// A manufactured solution: closed-form fields with f = -nu*Lap(u) - grad(p)
/// and Dirichlet data equal to the trace of u.
struct TestCase {
  std::string name;
  double nu = 1.0;
  VectorField velocity;
  ScalarField pressure;
  VectorField body_force;
  bool divergence_free = true;
};

/// Trigonometric divergence-free benchmark (homogeneous-scale data, the
/// stated trace is nonzero on the unit-square boundary and is imposed).
TestCase make_test1(double nu = 1.0);

/// Polynomial benchmark u = (y^4 + 1, x^4 + 2), p = x^3 - y^3 with
/// non-homogeneous polynomial Dirichlet data.
TestCase make_test2(double nu = 1.0);

/// Divergence-free polynomial pair of degree exactly (k, k-1), reproduced
/// exactly by the degree-k method.
TestCase make_patch_case(int k, double nu = 1.0);

enum class Scheme { Full, Reduced, ReducedPost };

std::string scheme_name(Scheme s);

struct ExperimentConfig {
  int test = 1;
  std::string family = "Q";  // "V", "T", "Q" or "file:PATH"
  std::vector<double> hs;    // nominal mesh sizes
  std::vector<int> ks;
  ElementKind kind = ElementKind::DivFree;
  Scheme scheme = Scheme::Full;
  std::uint64_t seed = 42;
  int lloyd_iters = 100;
  ComplementMode mode = ComplementMode::Rotational;
  int threads = 1;
  std::string out_dir;  // empty: no files written
};

struct RunRow {
  std::string family;
  double h = 0.0;        // nominal
  double h_actual = 0.0; // max cell diameter
  int k = 0;
  std::string scheme;
  long ndof = 0;
  double delta_u = std::nan("");
  double delta_p = std::nan("");
  double eps_u = std::nan("");
  double eps_p = std::nan("");
  double maxdiv = std::nan("");  // max_K ||div u_h|| / |u_h|_{1,h}
  double slope_u = std::nan("");
  double slope_p = std::nan("");
};

/// Mesh for a family at nominal size h: Q/T grids with n = 1/h cells per
/// side, Voronoi with round(1/h^2) Lloyd-relaxed seeds, or a mesh file.
PolyMesh make_family_mesh(const std::string& family, double h,
                          std::uint64_t seed, int lloyd_iters);

/// Solve on every (h, k), compare with the interpolated exact solution and
/// fit least-squares slopes of log(delta) against log(h) per k.
std::vector<RunRow> run_convergence(const ExperimentConfig& cfg,
                                    const TestCase& tc);

/// Solve full and reduced problems on identical meshes and report the
/// discrepancies eps(u), eps(p) together with the usual errors.
std::vector<RunRow> run_equivalence(const ExperimentConfig& cfg,
                                    const TestCase& tc);

struct DofRow {
  std::string family;
  double h = 0.0;
  int k = 0;
  long n_cells = 0;
  long dim_velocity = 0;       // interior velocity DoFs
  long dim_pressure = 0;       // with the zero-mean constraint (-1)
  long removed = 0;            // n_P (k(k+1) - 2)
  double saving_constrained = 0.0;  // removed / (V + Q - 1), percent
  double saving_raw = 0.0;          // removed / (V + Q), percent
};

/// DoF savings of the reduced scheme under both counting conventions.
std::vector<DofRow> dof_saving_table(const ExperimentConfig& cfg);

/// Least-squares slope of log(y) against log(x); NaN for fewer than two
/// valid points.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// CSV with one row per run: family,h,k,scheme,ndof,delta_u,delta_p,
/// eps_u,eps_p,maxdiv,slope_u,slope_p.
void write_csv(const std::vector<RunRow>& rows, const std::string& path);

/// Two-column (ndof, error) files per (family, k, scheme) group, sorted by
/// ndof ascending, mirroring error-vs-DoF plot axes.
void write_plot_files(const std::vector<RunRow>& rows, const std::string& dir);

void write_dof_csv(const std::vector<DofRow>& rows, const std::string& path);

}  // namespace vem

#endif
