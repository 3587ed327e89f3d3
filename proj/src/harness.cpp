#include "vem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace vem {

TestCase make_test1(double nu) {
  TestCase tc;
  tc.name = "test1";
  tc.nu = nu;
  tc.velocity = [](Point2 p) -> Point2 {
    const double cx = std::cos(p.x), cy = std::cos(p.y);
    return {-0.5 * cx * cx * cy * std::sin(p.y),
            0.5 * cy * cy * cx * std::sin(p.x)};
  };
  tc.pressure = [](Point2 p) { return std::sin(p.x) - std::sin(p.y); };
  tc.body_force = [nu](Point2 p) -> Point2 {
    const double s2x = std::sin(2 * p.x), c2x = std::cos(2 * p.x);
    const double s2y = std::sin(2 * p.y), c2y = std::cos(2 * p.y);
    // f = -nu Lap(u) - grad(p) with
    // Lap(u) = ( sin(2y)(1+2cos(2x))/2, -sin(2x)(1+2cos(2y))/2 ).
    return {-0.5 * nu * s2y * (1.0 + 2.0 * c2x) - std::cos(p.x),
            0.5 * nu * s2x * (1.0 + 2.0 * c2y) + std::cos(p.y)};
  };
  tc.divergence_free = true;
  return tc;
}

TestCase make_test2(double nu) {
  TestCase tc;
  tc.name = "test2";
  tc.nu = nu;
  tc.velocity = [](Point2 p) -> Point2 {
    return {p.y * p.y * p.y * p.y + 1.0, p.x * p.x * p.x * p.x + 2.0};
  };
  tc.pressure = [](Point2 p) {
    return p.x * p.x * p.x - p.y * p.y * p.y;
  };
  tc.body_force = [nu](Point2 p) -> Point2 {
    return {-12.0 * nu * p.y * p.y - 3.0 * p.x * p.x,
            -12.0 * nu * p.x * p.x + 3.0 * p.y * p.y};
  };
  tc.divergence_free = true;
  return tc;
}

TestCase make_patch_case(int k, double nu) {
  TestCase tc;
  tc.name = "patch_k" + std::to_string(k);
  tc.nu = nu;
  tc.velocity = [k](Point2 p) -> Point2 {
    return {std::pow(p.y, k) + 1.0, -std::pow(p.x, k) + 2.0};
  };
  tc.pressure = [k](Point2 p) {
    return std::pow(p.x, k - 1) - std::pow(p.y, k - 1);
  };
  tc.body_force = [k, nu](Point2 p) -> Point2 {
    const double c = k * (k - 1.0);
    const double xa = k >= 2 ? std::pow(p.x, k - 2) : 0.0;
    const double ya = k >= 2 ? std::pow(p.y, k - 2) : 0.0;
    return {-nu * c * ya - (k - 1.0) * xa, nu * c * xa + (k - 1.0) * ya};
  };
  tc.divergence_free = true;
  return tc;
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Full:
      return "full";
    case Scheme::Reduced:
      return "reduced";
    default:
      return "reduced-post";
  }
}

PolyMesh make_family_mesh(const std::string& family, double h,
                          std::uint64_t seed, int lloyd_iters) {
  if (family.rfind("file:", 0) == 0) return read_mesh(family.substr(5));
  if (family == "Q") return generate_quad_grid(std::lround(1.0 / h));
  if (family == "T") return generate_triangle_grid(std::lround(1.0 / h));
  if (family == "V")
    return generate_voronoi(std::lround(1.0 / (h * h)), lloyd_iters, seed);
  throw std::invalid_argument("unknown mesh family: " + family);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

long reported_ndof(const PolyMesh& mesh, int k, Scheme scheme) {
  const SpaceDims d = space_dimensions(mesh, k);
  if (scheme == Scheme::Full) return d.velocity + d.pressure;
  return d.velocity_reduced + d.pressure_reduced;
}

struct SolveOutcome {
  Solution sol;
  double delta_u, delta_p, maxdiv;
};

SolveOutcome solve_and_measure(const StokesDiscretization& disc,
                               const TestCase& tc, Scheme scheme) {
  ProblemData data{tc.nu, tc.body_force, tc.velocity};
  SolveOutcome out;
  switch (scheme) {
    case Scheme::Full:
      out.sol = disc.solve_full(data);
      break;
    case Scheme::Reduced:
      out.sol = disc.solve_reduced(data, false);
      break;
    case Scheme::ReducedPost:
      out.sol = disc.solve_reduced(data, true);
      break;
  }
  const Eigen::VectorXd uI = disc.interpolate_velocity(tc.velocity);
  const Eigen::VectorXd pI = disc.interpolate_pressure(tc.pressure);
  const double unorm = disc.energy_seminorm(uI);
  const double pnorm = disc.pressure_l2(pI);
  out.delta_u = disc.energy_seminorm(uI - out.sol.velocity) / unorm;
  out.delta_p = disc.pressure_l2(pI - out.sol.pressure) / pnorm;
  const std::vector<double> divs = disc.divergence_norms(out.sol.velocity);
  const double uh = disc.energy_seminorm(out.sol.velocity);
  double dmax = 0.0;
  for (double d : divs) dmax = std::max(dmax, d);
  out.maxdiv = dmax / std::max(uh, 1e-30);
  return out;
}

void fill_slopes(std::vector<RunRow>& rows) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i)
    groups[rows[i].family + "|" + std::to_string(rows[i].k) + "|" +
           rows[i].scheme]
        .push_back(i);
  for (const auto& [key, idx] : groups) {
    (void)key;
    std::vector<double> hs, du, dp;
    for (std::size_t i : idx) {
      hs.push_back(rows[i].h);
      du.push_back(rows[i].delta_u);
      dp.push_back(rows[i].delta_p);
    }
    const double su = fit_slope(hs, du);
    const double sp = fit_slope(hs, dp);
    for (std::size_t i : idx) {
      rows[i].slope_u = su;
      rows[i].slope_p = sp;
    }
  }
}

void maybe_write_outputs(const ExperimentConfig& cfg,
                         const std::vector<RunRow>& rows,
                         const std::string& stem) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  write_csv(rows, cfg.out_dir + "/" + stem + ".csv");
  write_plot_files(rows, cfg.out_dir);
}

}  // namespace

std::vector<RunRow> run_convergence(const ExperimentConfig& cfg,
                                    const TestCase& tc) {
  std::vector<RunRow> rows;
  for (double h : cfg.hs) {
    const PolyMesh mesh =
        make_family_mesh(cfg.family, h, cfg.seed, cfg.lloyd_iters);
    for (int k : cfg.ks) {
      StokesDiscretization disc(mesh, k, cfg.kind, tc.nu, cfg.mode,
                                cfg.threads);
      const SolveOutcome out = solve_and_measure(disc, tc, cfg.scheme);
      RunRow r;
      r.family = cfg.family;
      r.h = h;
      r.h_actual = mesh.h();
      r.k = k;
      r.scheme = scheme_name(cfg.scheme);
      r.ndof = reported_ndof(mesh, k, cfg.scheme);
      r.delta_u = out.delta_u;
      r.delta_p = out.delta_p;
      r.maxdiv = out.maxdiv;
      rows.push_back(r);
    }
  }
  fill_slopes(rows);
  maybe_write_outputs(cfg, rows, "convergence_" + tc.name);
  return rows;
}

std::vector<RunRow> run_equivalence(const ExperimentConfig& cfg,
                                    const TestCase& tc) {
  std::vector<RunRow> rows;
  for (double h : cfg.hs) {
    const PolyMesh mesh =
        make_family_mesh(cfg.family, h, cfg.seed, cfg.lloyd_iters);
    for (int k : cfg.ks) {
      StokesDiscretization disc(mesh, k, cfg.kind, tc.nu, cfg.mode,
                                cfg.threads);
      const SolveOutcome full = solve_and_measure(disc, tc, Scheme::Full);
      const SolveOutcome red =
          solve_and_measure(disc, tc, Scheme::ReducedPost);

      // eps(u): interpolate the full solution into the reduced space
      // (drop the divergence moments) and compare in the energy norm.
      Eigen::VectorXd u_restr = full.sol.velocity;
      const GlobalDofMap& dm = disc.dofs();
      for (int c = 0; c < mesh.n_cells(); ++c)
        for (int g = 0; g < poly_dim(k - 1) - 1; ++g)
          u_restr(dm.m4_dof(c, g)) = 0.0;
      const double eps_u =
          disc.energy_seminorm(u_restr - red.sol.velocity);
      double eps_p_sq = 0.0;
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const double d = full.sol.pressure(dm.pressure_p0(c)) -
                         red.sol.pressure(dm.pressure_p0(c));
        eps_p_sq += d * d;
      }

      RunRow r;
      r.family = cfg.family;
      r.h = h;
      r.h_actual = mesh.h();
      r.k = k;
      r.scheme = "reduced-post";
      r.ndof = reported_ndof(mesh, k, Scheme::ReducedPost);
      r.delta_u = red.delta_u;
      r.delta_p = red.delta_p;
      r.eps_u = eps_u;
      r.eps_p = std::sqrt(eps_p_sq);
      r.maxdiv = std::max(full.maxdiv, red.maxdiv);
      rows.push_back(r);
    }
  }
  fill_slopes(rows);
  maybe_write_outputs(cfg, rows, "equivalence_" + tc.name);
  return rows;
}

std::vector<DofRow> dof_saving_table(const ExperimentConfig& cfg) {
  std::vector<DofRow> rows;
  for (double h : cfg.hs) {
    const PolyMesh mesh =
        make_family_mesh(cfg.family, h, cfg.seed, cfg.lloyd_iters);
    for (int k : cfg.ks) {
      const SpaceDims d = space_dimensions(mesh, k);
      DofRow r;
      r.family = cfg.family;
      r.h = h;
      r.k = k;
      r.n_cells = mesh.n_cells();
      r.dim_velocity = d.velocity;
      r.dim_pressure = d.pressure;
      r.removed = static_cast<long>(mesh.n_cells()) * (k * (k + 1) - 2);
      r.saving_constrained =
          100.0 * double(r.removed) / double(d.velocity + d.pressure);
      r.saving_raw =
          100.0 * double(r.removed) / double(d.velocity + d.pressure + 1);
      rows.push_back(r);
    }
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10e", v);
  return buf;
}

}  // namespace

void write_csv(const std::vector<RunRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "family,h,k,scheme,ndof,delta_u,delta_p,eps_u,eps_p,maxdiv,slope_u,"
        "slope_p\n";
  for (const RunRow& r : rows) {
    os << r.family << ',' << fmt(r.h) << ',' << r.k << ',' << r.scheme << ','
       << r.ndof << ',' << fmt(r.delta_u) << ',' << fmt(r.delta_p) << ','
       << fmt(r.eps_u) << ',' << fmt(r.eps_p) << ',' << fmt(r.maxdiv) << ','
       << fmt(r.slope_u) << ',' << fmt(r.slope_p) << '\n';
  }
}

void write_plot_files(const std::vector<RunRow>& rows,
                      const std::string& dir) {
  std::map<std::string, std::vector<const RunRow*>> groups;
  for (const RunRow& r : rows)
    groups[r.family + "_k" + std::to_string(r.k) + "_" + r.scheme].push_back(
        &r);
  for (auto& [key, grp] : groups) {
    std::sort(grp.begin(), grp.end(),
              [](const RunRow* a, const RunRow* b) { return a->ndof < b->ndof; });
    for (const char* metric : {"du", "dp"}) {
      std::ofstream os(dir + "/plot_" + key + "_" + metric + ".dat");
      for (const RunRow* r : grp)
        os << r->ndof << ' '
           << fmt(metric[1] == 'u' ? r->delta_u : r->delta_p) << '\n';
    }
  }
}

void write_dof_csv(const std::vector<DofRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "family,h,k,n_cells,dim_velocity,dim_pressure,removed,"
        "saving_constrained_pct,saving_raw_pct\n";
  for (const DofRow& r : rows) {
    os << r.family << ',' << fmt(r.h) << ',' << r.k << ',' << r.n_cells << ','
       << r.dim_velocity << ',' << r.dim_pressure << ',' << r.removed << ','
       << fmt(r.saving_constrained) << ',' << fmt(r.saving_raw) << '\n';
  }
}

}  // namespace vem
