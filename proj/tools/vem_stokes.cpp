// Command-line driver for the polygonal Stokes experiments: convergence
// and equivalence runs over the mesh families, and the DoF-saving table.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "vem/harness.hpp"

namespace {

double parse_size(const std::string& tok) {
  const auto slash = tok.find('/');
  if (slash != std::string::npos) {
    const double num = std::stod(tok.substr(0, slash));
    const double den = std::stod(tok.substr(slash + 1));
    return num / den;
  }
  return std::stod(tok);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

struct CliOptions {
  int test = 1;
  std::string family = "Q";
  std::string h_list = "1/4,1/8,1/16";
  std::string k_list = "2";
  std::string element = "new";
  std::string scheme = "full";
  std::uint64_t seed = 42;
  int lloyd = 100;
  int threads = 0;
  double nu = 1.0;
  std::string gsplit = "rot";
  std::string out_dir;
  std::string config_path;
};

void apply_config_file(CliOptions& o, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      const auto e = s.find_last_not_of(" \t");
      if (e != std::string::npos) s.erase(e + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "test") o.test = std::stoi(val);
    else if (key == "family") o.family = val;
    else if (key == "h") o.h_list = val;
    else if (key == "k") o.k_list = val;
    else if (key == "element") o.element = val;
    else if (key == "scheme") o.scheme = val;
    else if (key == "seed") o.seed = std::stoull(val);
    else if (key == "lloyd") o.lloyd = std::stoi(val);
    else if (key == "threads") o.threads = std::stoi(val);
    else if (key == "nu") o.nu = std::stod(val);
    else if (key == "gsplit") o.gsplit = val;
    else if (key == "out") o.out_dir = val;
    else throw std::runtime_error("unknown config key: " + key);
  }
}

vem::ExperimentConfig to_experiment(const CliOptions& o) {
  vem::ExperimentConfig cfg;
  cfg.test = o.test;
  cfg.family = o.family;
  for (const std::string& t : split_list(o.h_list))
    cfg.hs.push_back(parse_size(t));
  for (const std::string& t : split_list(o.k_list))
    cfg.ks.push_back(std::stoi(t));
  if (o.element == "new") cfg.kind = vem::ElementKind::DivFree;
  else if (o.element == "classic") cfg.kind = vem::ElementKind::Classic;
  else throw std::runtime_error("unknown element: " + o.element);
  if (o.scheme == "full") cfg.scheme = vem::Scheme::Full;
  else if (o.scheme == "reduced") cfg.scheme = vem::Scheme::Reduced;
  else if (o.scheme == "reduced-post") cfg.scheme = vem::Scheme::ReducedPost;
  else throw std::runtime_error("unknown scheme: " + o.scheme);
  if (cfg.kind == vem::ElementKind::Classic && cfg.scheme != vem::Scheme::Full)
    throw std::runtime_error("the classic element has no reduced scheme");
  cfg.seed = o.seed;
  cfg.lloyd_iters = o.lloyd;
  cfg.mode = o.gsplit == "orth" ? vem::ComplementMode::Orthogonal
                                : vem::ComplementMode::Rotational;
  cfg.threads = o.threads > 0
                    ? o.threads
                    : std::max(1u, std::thread::hardware_concurrency());
  cfg.out_dir = o.out_dir;
  return cfg;
}

std::string resolved_config(const CliOptions& o) {
  std::ostringstream ss;
  ss << "test=" << o.test << "\nfamily=" << o.family << "\nh=" << o.h_list
     << "\nk=" << o.k_list << "\nelement=" << o.element
     << "\nscheme=" << o.scheme << "\nseed=" << o.seed
     << "\nlloyd=" << o.lloyd << "\nthreads=" << o.threads
     << "\nnu=" << o.nu << "\ngsplit=" << o.gsplit << "\nout=" << o.out_dir
     << "\n";
  return ss.str();
}

int cmd_run(const CliOptions& o) {
  const vem::ExperimentConfig cfg = to_experiment(o);
  const vem::TestCase tc =
      o.test == 1 ? vem::make_test1(o.nu) : vem::make_test2(o.nu);

  std::cout << "resolved config:\n" << resolved_config(o);
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream(cfg.out_dir + "/config_resolved.txt") << resolved_config(o);
  }

  const bool with_eps = cfg.scheme == vem::Scheme::ReducedPost;
  const std::vector<vem::RunRow> rows =
      with_eps ? vem::run_equivalence(cfg, tc) : vem::run_convergence(cfg, tc);

  std::printf("%-6s %-9s %-2s %-12s %8s %12s %12s %12s %12s %12s\n", "family",
              "h", "k", "scheme", "ndof", "delta_u", "delta_p", "eps_u",
              "eps_p", "maxdiv");
  for (const vem::RunRow& r : rows)
    std::printf("%-6s %-9.5f %-2d %-12s %8ld %12.4e %12.4e %12.4e %12.4e "
                "%12.4e\n",
                r.family.c_str(), r.h, r.k, r.scheme.c_str(), r.ndof,
                r.delta_u, r.delta_p, r.eps_u, r.eps_p, r.maxdiv);
  std::set<std::string> printed;
  for (const vem::RunRow& r : rows) {
    const std::string group =
        r.family + "|" + std::to_string(r.k) + "|" + r.scheme;
    if (std::isnan(r.slope_u) || !printed.insert(group).second) continue;
    std::printf("slopes family=%s k=%d scheme=%s: slope_u=%.3f slope_p=%.3f\n",
                r.family.c_str(), r.k, r.scheme.c_str(), r.slope_u, r.slope_p);
  }

  // A divergence-free run must stay divergence-free to solver tolerance.
  int rc = 0;
  if (tc.divergence_free && cfg.kind == vem::ElementKind::DivFree) {
    for (const vem::RunRow& r : rows) {
      if (!(r.maxdiv <= 1e-9)) {
        std::fprintf(stderr,
                     "FAIL divergence bound: family=%s h=%g k=%d maxdiv=%.3e\n",
                     r.family.c_str(), r.h, r.k, r.maxdiv);
        rc = 2;
      }
    }
  }
  return rc;
}

int cmd_dof_table(const CliOptions& o) {
  const vem::ExperimentConfig cfg = to_experiment(o);
  const std::vector<vem::DofRow> rows = vem::dof_saving_table(cfg);
  std::printf("%-6s %-9s %-2s %8s %10s %10s %9s %12s %12s\n", "family", "h",
              "k", "cells", "dimV", "dimQ", "removed", "saving(-1)%",
              "saving(raw)%");
  for (const vem::DofRow& r : rows)
    std::printf("%-6s %-9.5f %-2d %8ld %10ld %10ld %9ld %12.3f %12.3f\n",
                r.family.c_str(), r.h, r.k, r.n_cells, r.dim_velocity,
                r.dim_pressure, r.removed, r.saving_constrained, r.saving_raw);
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    vem::write_dof_csv(rows, cfg.out_dir + "/dof_table.csv");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divergence-free virtual element solver for 2D Stokes"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  CliOptions run_opts, dof_opts;
  auto add_common = [](CLI::App* cmd, CliOptions& o) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--family", o.family, "V, T, Q or file:PATH");
    cmd->add_option("--h", o.h_list, "comma-separated sizes, e.g. 1/4,1/8");
    cmd->add_option("--k", o.k_list, "comma-separated degrees >= 2");
    cmd->add_option("--seed", o.seed, "RNG seed for Voronoi meshes");
    cmd->add_option("--lloyd", o.lloyd, "Lloyd iterations for Voronoi");
    cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--config", o.config_path, "key=value config file");
  };

  CLI::App* run = app.add_subcommand("run", "solve and report errors");
  add_common(run, run_opts);
  run->add_option("--test", run_opts.test, "manufactured solution, 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  run->add_option("--element", run_opts.element, "new | classic");
  run->add_option("--scheme", run_opts.scheme,
                  "full | reduced | reduced-post");
  run->add_option("--nu", run_opts.nu, "viscosity");
  run->add_option("--gsplit", run_opts.gsplit, "rot | orth complement");

  CLI::App* dof = app.add_subcommand("dof-table", "DoF savings table");
  add_common(dof, dof_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!run_opts.config_path.empty()) {
        CliOptions base;
        apply_config_file(base, run_opts.config_path);
        // Re-parse so that explicit flags override file values.
        base.config_path = run_opts.config_path;
        CLI::App app2{""};
        CliOptions& o = base;
        app2.add_option("--family", o.family);
        app2.add_option("--h", o.h_list);
        app2.add_option("--k", o.k_list);
        app2.add_option("--seed", o.seed);
        app2.add_option("--lloyd", o.lloyd);
        app2.add_option("--threads", o.threads);
        app2.add_option("--out", o.out_dir);
        app2.add_option("--config", o.config_path);
        app2.add_option("--test", o.test);
        app2.add_option("--element", o.element);
        app2.add_option("--scheme", o.scheme);
        app2.add_option("--nu", o.nu);
        app2.add_option("--gsplit", o.gsplit);
        app2.allow_extras();
        std::vector<std::string> args(argv + 2, argv + argc);
        std::reverse(args.begin(), args.end());
        app2.parse(args);
        return cmd_run(o);
      }
      return cmd_run(run_opts);
    }
    if (dof->parsed()) return cmd_dof_table(dof_opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
