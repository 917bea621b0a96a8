#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "kqp/config.hpp"
#include "kqp/version.hpp"

namespace fs = std::filesystem;
using namespace kqp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitMath = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;             // 0: keep the config value
  unsigned long seed = 0;      // 0: keep the config value
  bool override_exponents = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "path to the JSON run configuration")
      ->required();
  cmd->add_option("--out", a.out_dir, "output directory (created if missing)");
  cmd->add_option("--threads", a.threads, "worker threads for scans");
  cmd->add_option("--seed", a.seed, "seed for randomized diagnostics");
  cmd->add_flag("--override-exponents", a.override_exponents,
                "run even when the exponent inequalities fail");
}

RunConfig load_config(const CommonArgs& a) {
  RunConfig cfg = RunConfig::load(a.config_path);
  if (a.threads > 0) {
    cfg.threads = a.threads;
    cfg.scan.threads = a.threads;
  }
  if (a.seed > 0) cfg.seed = a.seed;
  return cfg;
}

ordered_json meta_block(const RunConfig& cfg) {
  ordered_json m;
  m["artifact_version"] = kVersion;
  m["config_hash"] = cfg.config_hash;
  return m;
}

void write_json(const ordered_json& j, const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  os << j.dump(2) << "\n";
}

int run_solve(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  fs::create_directories(args.out_dir);

  auto chk = check_exponents(cfg.exponents);
  if (!chk.ok && !args.override_exponents) {
    std::cerr << "exponent set rejected:";
    for (auto& v : chk.violations) std::cerr << " [" << v << "]";
    std::cerr << "\n";
    return kExitConfig;
  }
  SolveOptions opts = cfg.solve;
  opts.override_exponents = true;  // validation already done above

  ProblemData pd = cfg.make_problem_data();
  SolveResult res = solve(pd, cfg.lambda, cfg.exponents, opts);

  {
    std::ofstream trace(fs::path(args.out_dir) / "trace.jsonl");
    for (const auto& st : res.trace) {
      ordered_json row;
      row["n"] = st.n;
      row["N_n"] = st.N_n;
      row["residual_s0"] = st.residual_s0;
      row["step_norm_s1"] = st.step_norm_s1;
      row["log10_u_norm_S"] = st.log10_u_norm_S;
      row["condition_estimate"] = st.condition_estimate;
      row["wall_ms"] = st.wall_ms;
      row["support_ok"] = st.support_ok;
      trace << row.dump() << "\n";
    }
  }

  ordered_json summary = meta_block(cfg);
  summary["lambda"] = cfg.lambda;
  summary["epsilon"] = cfg.epsilon;
  summary["converged"] = res.converged;
  summary["steps"] = res.trace.empty() ? 0 : res.trace.back().n;
  summary["final_residual_s0"] =
      res.trace.empty() ? -1.0 : res.trace.back().residual_s0;
  if (!res.failure.empty()) summary["failure"] = res.failure;

  if (res.converged) {
    ordered_json sol = meta_block(cfg);
    sol["lambda"] = cfg.lambda;
    sol["epsilon"] = cfg.epsilon;
    sol["u"] = torus_function_to_json(res.u);
    sol["v0"] = torus_function_to_json(recover_v0(pd, cfg.lambda));
    write_json(sol, fs::path(args.out_dir) / "solution.json");

    ReductionResult red = reduce(pd, cfg.lambda, res.u, cfg.solve.box_phi,
                                 cfg.solve.box_x, cfg.solve.reduce);
    TorusFunction probe = project(res.u, cfg.solve.box_phi / 2);
    if (probe.sobolev_norm(0) < 1e-14) probe = scaled(pd.g, 1.0).resized(
        cfg.solve.box_phi, cfg.solve.box_x);
    auto [resid, scale] = conjugation_residual(pd, cfg.lambda, res.u, red, probe);
    summary["reduction"] = reduction_report(red, scale > 0 ? resid / scale : 0.0);
  }
  write_json(summary, fs::path(args.out_dir) / "summary.json");

  std::cout << (res.converged ? "converged" : ("failed: " + res.failure)) << "\n";
  return res.converged ? kExitOk : kExitMath;
}

int run_diagnose(const CommonArgs& args, double lambda_cli, double theta_cli, int N_cli,
                 bool at_zero, bool dump_r2) {
  RunConfig cfg = load_config(args);
  fs::create_directories(args.out_dir);
  double lambda = lambda_cli != 0 ? lambda_cli : cfg.lambda;
  double theta = theta_cli;
  int N = N_cli >= 0 ? N_cli : cfg.diag_N;

  ProblemData pd = cfg.make_problem_data();

  ordered_json rep = meta_block(cfg);
  rep["lambda"] = lambda;
  rep["theta"] = theta;
  rep["N"] = N;

  if (N == 0) {
    rep["n_singular"] = 0;
    rep["note"] = "empty box";
    write_json(rep, fs::path(args.out_dir) / "diagnostic.json");
    std::cout << rep.dump(2) << "\n";
    return kExitOk;
  }

  TorusFunction u(Box(cfg.nu, cfg.d, cfg.scan.solve.box_phi, cfg.scan.solve.box_x));
  bool converged = false;
  if (!at_zero) {
    SolveOptions so = cfg.scan.solve;
    so.override_exponents = true;
    SolveResult res = solve(pd, lambda, cfg.exponents, so);
    converged = res.converged;
    if (res.converged) u = res.u;
  }
  rep["solver_converged"] = converged;

  ReductionResult red = reduce(pd, lambda, u, cfg.scan.solve.box_phi,
                               cfg.scan.solve.box_x, cfg.scan.solve.reduce);
  if (dump_r2) dump_decay_matrix_csv(red.R2, (fs::path(args.out_dir) / "R2.csv").string());
  ShiftedOperator op{lambda, theta, &red, &pd.fd};

  const int ambient = cfg.diag_ambient > 0 ? cfg.diag_ambient : std::max(2 * N * N, 16);
  auto region = DecayMatrix::window_indices(
      MultiIndex{std::vector<int>(cfg.nu, 0), std::vector<int>(cfg.d, 0)}, ambient);
  auto sing = singular_sites(op, region);
  rep["ambient_radius"] = ambient;
  rep["n_sites"] = region.size();
  rep["n_singular"] = sing.size();

  auto chains = gamma_chains(sing, 2);
  int max_len = 0;
  bool exact = true;
  for (auto& c : chains) {
    max_len = std::max(max_len, c.length());
    exact = exact && c.exact;
  }
  rep["max_chain_len"] = max_len;
  rep["chain_len_exact"] = exact;
  rep["section_cap"] = section_cap(sing);

  ClassifyParams cp;
  cp.tau = cfg.exponents.tau;
  cp.delta = cfg.exponents.delta;
  double s2 = cfg.exponents.s1 - cfg.exponents.sigma;
  cp.s_list = {cfg.exponents.s0, 0.5 * (cfg.exponents.s0 + s2), s2};
  auto cls = classify_bad_sites(op, region, N, cp);
  rep["n_weakly_bad"] = cls.weakly_bad.size();
  rep["n_unresolved"] = cls.n_unresolved;
  rep["windows_certified"] = cls.n_certified;
  rep["windows_dense"] = cls.n_dense;

  auto sep = check_separation(cls.weakly_bad, N, 2.0);
  rep["separation_ok"] = sep.ok;
  ordered_json clusters = ordered_json::array();
  for (auto& cl : sep.clusters) {
    ordered_json c;
    c["diam"] = cl.diam;
    c["size"] = cl.sites.size();
    clusters.push_back(c);
  }
  rep["clusters"] = std::move(clusters);

  ThetaScanParams tp;
  tp.tau1 = cfg.scan.tau1;
  ordered_json ivals = ordered_json::array();
  std::vector<int> j0(cfg.d, 0);
  j0[0] = 1;
  for (auto& iv : bad_theta_set(pd, lambda, red, j0, N, tp))
    ivals.push_back({iv[0], iv[1]});
  rep["bad_theta_intervals"] = std::move(ivals);

  write_json(rep, fs::path(args.out_dir) / "diagnostic.json");
  std::cout << rep.dump(2) << "\n";
  return kExitOk;
}

int run_scan(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  fs::create_directories(args.out_dir);

  auto chk = check_exponents(cfg.exponents);
  if (!chk.ok && !args.override_exponents) {
    std::cerr << "exponent set rejected:";
    for (auto& v : chk.violations) std::cerr << " [" << v << "]";
    std::cerr << "\n";
    return kExitConfig;
  }

  ProblemData pd = cfg.make_problem_data();
  ScanParams par = cfg.scan;
  par.solve.override_exponents = true;
  par.lambda_grid.clear();
  for (int i = 0; i < cfg.lambda_points; ++i) {
    double t = cfg.lambda_points == 1 ? 0.5
                                      : static_cast<double>(i) / (cfg.lambda_points - 1);
    par.lambda_grid.push_back(cfg.lambda_min + t * (cfg.lambda_max - cfg.lambda_min));
  }

  ScanReport rep = scan_lambda(pd, par);
  write_scan_csv(rep, (fs::path(args.out_dir) / "scan.csv").string());
  ordered_json summary = meta_block(cfg);
  summary["scan"] = scan_summary(rep);
  write_json(summary, fs::path(args.out_dir) / "summary.json");
  std::cout << "bad_fraction " << rep.bad_fraction << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral toolkit for quasi-periodic solutions of the forced Kirchhoff "
               "equation on T^d"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs solve_args, diag_args, scan_args;
  double diag_lambda = 0, diag_theta = 0;
  int diag_N = -1;
  bool diag_at_zero = false, diag_dump_r2 = false;

  auto* cmd_solve = app.add_subcommand("solve", "run the iterative solver at fixed lambda");
  add_common(cmd_solve, solve_args);

  auto* cmd_diag = app.add_subcommand("diagnose", "site/chain/cluster diagnostics");
  add_common(cmd_diag, diag_args);
  cmd_diag->add_option("--lambda", diag_lambda, "parameter value (default: config)");
  cmd_diag->add_option("--theta", diag_theta, "diagonal shift");
  cmd_diag->add_option("--N", diag_N, "scale of the window tests");
  cmd_diag->add_flag("--at-zero", diag_at_zero, "diagnose at u = 0 instead of solving");
  cmd_diag->add_flag("--dump-r2", diag_dump_r2, "write R2.csv");

  auto* cmd_scan = app.add_subcommand("scan", "lambda-grid classification scan");
  add_common(cmd_scan, scan_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_solve->parsed()) return run_solve(solve_args);
    if (cmd_diag->parsed())
      return run_diagnose(diag_args, diag_lambda, diag_theta, diag_N, diag_at_zero,
                          diag_dump_r2);
    if (cmd_scan->parsed()) return run_scan(scan_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BadParameter& e) {
    std::cerr << "bad parameter: " << e.what() << "\n";
    return kExitMath;
  } catch (const StepFailed& e) {
    std::cerr << "step failed: " << e.what() << "\n";
    return kExitMath;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
