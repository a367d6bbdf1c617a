// zcrit: batch front end for the verification library. Subcommands: verify
// (run a suite from a config and write reports), verify-bundle (verify with
// the bundle suite forced), solve-dhym (dissipative line-bundle solve with a
// CSV convergence trace), charge eval (exact builtin charge values), report
// (re-render a written report directory). Exit codes: 0 all selected checks
// pass / solve converged, 1 a check or solve failed, 2 configuration or
// runtime error.
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "zcrit/bundle.hpp"
#include "zcrit/charge.hpp"
#include "zcrit/config.hpp"
#include "zcrit/kgeom.hpp"
#include "zcrit/runner.hpp"

namespace {

using zcrit::RunConfig;

std::string format_double(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// Rational multiples of pi print exactly ("-pi/2", "3*pi/4"); anything else
// falls back to the decimal value.
std::string phase_string(double phi) {
  const double ratio = phi / std::numbers::pi;
  for (int q = 1; q <= 24; ++q) {
    const double scaled = ratio * q;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) < 1e-12 * q) {
      const long long p = static_cast<long long>(rounded);
      if (p == 0) return "0";
      std::string s = p < 0 ? "-" : "";
      const long long ap = p < 0 ? -p : p;
      s += ap == 1 ? "pi" : std::to_string(ap) + "*pi";
      if (q > 1) s += "/" + std::to_string(q);
      return s;
    }
  }
  return format_double(phi);
}

// Flags shared by verify and verify-bundle.
struct VerifyFlags {
  std::string config_path;
  std::string suite;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::string out;
  int grid = 0;
  CLI::Option* suite_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
};

void attach_verify_flags(CLI::App* cmd, VerifyFlags& flags, bool with_suite) {
  cmd->add_option("--config", flags.config_path,
                  "Configuration file (default: configs/default.cfg if "
                  "present, else the embedded default)");
  if (with_suite)
    flags.suite_opt =
        cmd->add_option("--suite", flags.suite,
                        "Suite to run: all, manifold, bundle, family "
                        "(default from the config)");
  flags.seed_opt = cmd->add_option(
      "--seed", flags.seed, "Seed override for every randomized check");
  flags.tol_opt = cmd->add_option(
      "--tol", flags.tol,
      "Single tolerance applied to every check, overriding defaults and the "
      "[tolerance] section");
  flags.out_opt =
      cmd->add_option("--out", flags.out, "Output directory override");
  flags.grid_opt = cmd->add_option(
      "--grid", flags.grid,
      "Grid override applied to every [geometry] section (torus points per "
      "axis / sphere profile order)");
}

RunConfig load_config(const std::string& config_path) {
  if (!config_path.empty()) return zcrit::parse_config_file(config_path);
  if (std::ifstream probe("configs/default.cfg"); probe.good())
    return zcrit::parse_config_file("configs/default.cfg");
  return zcrit::parse_config_text(zcrit::default_config_text());
}

int run_verify(const VerifyFlags& flags, const std::string& forced_suite) {
  RunConfig config = load_config(flags.config_path);
  if (!forced_suite.empty())
    config.suite = forced_suite;
  else if (flags.suite_opt != nullptr && flags.suite_opt->count() > 0)
    config.suite = flags.suite;
  if (flags.seed_opt->count() > 0) {
    config.seed = flags.seed;
    config.seed_set = true;
  }
  if (flags.tol_opt->count() > 0) {
    config.global_tolerance = flags.tol;
    config.global_tolerance_set = true;
  }
  if (flags.out_opt->count() > 0) config.output_dir = flags.out;
  if (flags.grid_opt->count() > 0)
    for (auto& geometry : config.geometries) geometry.grid = flags.grid;
  zcrit::validate_config(config);

  const zcrit::SuiteResult result = zcrit::run_suite(config, config.suite);
  zcrit::write_artifacts(config, result);
  std::cout << zcrit::summary_table(result);
  std::cout << "artifacts written to " << config.output_dir << "\n";
  return result.all_pass() ? 0 : 1;
}

int run_solve(const std::string& model_name, int grid_points, long long degree,
              std::uint64_t seed, double target, double amplitude,
              int max_iterations, const std::string& out_dir) {
  const int n = model_name == "t4" ? 2 : 1;
  zcrit::TorusGrid grid(n, grid_points);
  auto model = zcrit::make_bundle_model(
      zcrit::metric_from_potential(grid, grid.zero_field()), 1, degree);
  const zcrit::Field start = zcrit::seeded_torus_potential(
      grid, zcrit::derive_seed(seed, "solve-dhym", 0), amplitude);

  zcrit::FlowControls controls;
  controls.max_iterations = max_iterations;
  controls.target = target;
  controls.throw_on_max_iterations = false;
  const zcrit::SolveResult result =
      zcrit::solve_dhym_line_bundle(model, start, controls);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw zcrit::ConfigError("cannot create output directory '" + out_dir +
                             "': " + ec.message());
  const std::string trace_path = out_dir + "/solve-dhym-trace.csv";
  zcrit::write_flow_trace(result.trace, trace_path);
  const std::string potential_path = out_dir + "/solve-dhym-potential.csv";
  zcrit::emit_plot_data(zcrit::function_form(grid, result.potential),
                        potential_path);

  const zcrit::FlowSample last =
      result.trace.empty() ? zcrit::FlowSample{} : result.trace.back();
  std::cout << "solve-dhym: model " << model_name << ", grid " << grid_points
            << ", degree " << degree << ", seed " << seed << "\n";
  std::cout << (result.converged ? "converged" : "did not converge")
            << " after " << last.iteration << " iterations: residual sup "
            << format_double(last.residual_sup) << ", charge drift "
            << format_double(last.trace_drift) << "\n";
  std::cout << "trace written to " << trace_path << "\n";
  std::cout << "final potential written to " << potential_path << "\n";
  return result.converged ? 0 : 1;
}

int run_charge_eval(const std::string& name, const std::string& model,
                    int rank, long long degree) {
  const int n = model == "t4" ? 2 : 1;
  const zcrit::CentralChargeSpec spec = zcrit::builtin_charge(name, n);
  const bool bundle_kind = spec.kind == zcrit::ChargeKind::Bundle;
  zcrit::ModelTopology topology;
  if (model == "cp1") {
    const zcrit::ExactScalar four_pi(zcrit::GaussianRational(4), 1);
    topology = bundle_kind ? zcrit::topology_cp1_bundle(four_pi, rank, degree)
                           : zcrit::topology_cp1(four_pi);
  } else {
    topology = bundle_kind ? zcrit::topology_torus_bundle(n, rank, degree)
                           : zcrit::topology_torus(n);
  }
  const zcrit::ExactScalar value = zcrit::evaluate_charge(spec, topology);

  std::cout << "Z(" << name << " on " << model;
  if (bundle_kind) std::cout << ", rank " << rank << ", degree " << degree;
  std::cout << ") = " << value.to_string() << "\n";
  if (value.is_zero()) {
    std::cout << "phase undefined (the charge vanishes)\n";
    return 0;
  }
  const double phi = zcrit::phase(value);
  std::cout << "phase = " << phase_string(phi) << " (" << format_double(phi)
            << ")\n";
  return 0;
}

int run_report(const std::string& dir) {
  const std::string path = dir + "/reports.json";
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw zcrit::ConfigError("cannot read report file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const zcrit::SuiteResult result = zcrit::reports_from_json(text.str());
  std::cout << zcrit::summary_table(result);
  return result.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Verification toolkit for central-charge critical metrics and "
      "connections: charge evaluation, identity check suites, and a "
      "deformed Hermitian Yang-Mills line-bundle solver"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand(
      "verify", "Run a verification suite from a configuration");
  VerifyFlags verify_flags;
  attach_verify_flags(verify, verify_flags, true);

  auto* verify_bundle = app.add_subcommand(
      "verify-bundle", "Run the bundle verification suite (verify with "
                       "--suite bundle fixed)");
  VerifyFlags bundle_flags;
  attach_verify_flags(verify_bundle, bundle_flags, false);

  auto* solve = app.add_subcommand(
      "solve-dhym",
      "Flow a seeded line-bundle connection to the deformed Hermitian "
      "Yang-Mills solution and write the convergence trace");
  std::string solve_model = "t2";
  solve->add_option("--model", solve_model, "Torus model: t2 or t4")
      ->check(CLI::IsMember({"t2", "t4"}));
  int solve_grid = 0;
  solve->add_option("--grid", solve_grid,
                    "Points per axis (default 32 on t2, 12 on t4)");
  long long solve_degree = 1;
  solve->add_option("--degree", solve_degree, "Line bundle degree");
  std::uint64_t solve_seed = 7;
  solve->add_option("--seed", solve_seed, "Seed for the random start");
  double solve_tol = 1e-8;
  solve->add_option("--tol", solve_tol, "Residual sup-norm target");
  double solve_amplitude = 0.3;
  solve->add_option("--amplitude", solve_amplitude,
                    "Amplitude of the random start");
  int solve_max = 4000;
  solve->add_option("--max-iterations", solve_max, "Iteration cap");
  std::string solve_out = "reports";
  solve->add_option("--out", solve_out, "Output directory");

  auto* charge = app.add_subcommand(
      "charge", "Evaluate builtin central charges on model topologies");
  charge->require_subcommand(1);
  auto* eval = charge->add_subcommand(
      "eval", "Print the exact value and phase of a builtin charge");
  std::string eval_name;
  eval->add_option("--name", eval_name, "Builtin charge: csck, dhym, exp, hym")
      ->required();
  std::string eval_model = "t2";
  eval->add_option("--model", eval_model, "Topology: t2, t4, or cp1")
      ->check(CLI::IsMember({"t2", "t4", "cp1"}));
  int eval_rank = 1;
  eval->add_option("--rank", eval_rank, "Bundle rank (bundle charges)");
  long long eval_degree = 0;
  eval->add_option("--degree", eval_degree, "Bundle degree (bundle charges)");

  auto* report = app.add_subcommand(
      "report", "Re-render the summary table of a written report directory");
  std::string report_dir = "reports";
  report->add_option("--out", report_dir,
                     "Directory containing reports.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return run_verify(verify_flags, "");
    if (verify_bundle->parsed()) return run_verify(bundle_flags, "bundle");
    if (solve->parsed()) {
      if (solve_grid == 0) solve_grid = solve_model == "t4" ? 12 : 32;
      return run_solve(solve_model, solve_grid, solve_degree, solve_seed,
                       solve_tol, solve_amplitude, solve_max, solve_out);
    }
    if (charge->parsed() && eval->parsed())
      return run_charge_eval(eval_name, eval_model, eval_rank, eval_degree);
    if (report->parsed()) return run_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
