#include "uavmec/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "uavmec/experiment.hpp"
#include "uavmec/optimizer.hpp"
#include "uavmec/report.hpp"
#include "uavmec/scenario.hpp"
#include "uavmec/verify.hpp"

namespace uavmec {
namespace {

namespace fs = std::filesystem;

struct SolveArgs {
  std::string scenario;
  std::string method = "proposed";
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::optional<int> restarts;
  std::string out;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Scenario s = load(a.scenario);
  OptimizerConfig cfg;
  if (a.seed) cfg.seed = *a.seed;
  if (a.max_iters) cfg.max_outer_iters = *a.max_iters;
  if (a.tol) cfg.rel_tol = *a.tol;
  if (a.restarts) cfg.restarts = *a.restarts;
  validate(cfg);

  std::vector<Method> methods;
  if (a.method == "all")
    methods = {Method::Proposed, Method::Hpo, Method::Vpo, Method::Clbo};
  else
    methods = {parse_method(a.method)};

  fs::create_directories(a.out);
  bool all_converged = true;
  for (Method m : methods) {
    const SolveReport r = solve(m, s, cfg);
    const std::string tag(to_string(m));
    std::ofstream json(fs::path(a.out) / ("report_" + tag + ".json"), std::ios::binary);
    if (!json) throw std::runtime_error("cannot write into " + a.out);
    json << report_to_json(s, cfg, r).dump(2) << '\n';
    write_deployment_csv(fs::path(a.out) / ("deployment_" + tag + ".csv"), s, cfg, r);
    write_association_csv(fs::path(a.out) / ("association_" + tag + ".csv"), s, cfg, r);
    out << "method=" << tag << " mu_s=" << format_double(r.mu)
        << " iterations=" << r.iterations << " converged=" << (r.converged ? "true" : "false")
        << '\n';
    all_converged = all_converged && r.converged;
  }
  return all_converged ? 0 : 2;
}

int cmd_sweep(const std::string& spec_path, const std::string& dir, int jobs, std::ostream& out) {
  const ExperimentSpec spec = load_spec(spec_path);
  const auto rows = run_sweep(spec, jobs);
  write_sweep_outputs(dir, spec, rows);
  int errors = 0;
  for (const auto& r : rows) errors += r.status.rfind("error", 0) == 0;
  out << rows.size() << " runs, " << errors << " errors, outputs in " << dir << '\n';
  return 0;
}

int cmd_verify(const std::string& level, const std::string& fault, std::ostream& out) {
  VerifyOptions opt;
  opt.level = level == "full" ? VerifyLevel::Full : VerifyLevel::Fast;
  opt.fault = fault == "psi-sign" ? Fault::PsiSign : Fault::None;
  int failed = 0;
  run_verification(opt, [&](const CheckResult& r) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " (" << secs << " s)"
        << std::endl;
    failed += !r.passed;
  });
  out << (failed ? "verification failed: " + std::to_string(failed) + " check(s)"
                 : std::string("all checks passed"))
      << '\n';
  return failed ? 1 : 0;
}

int cmd_gen(int ues, int uavs, std::uint64_t seed, const std::string& path, std::ostream& out) {
  FleetConfig fleet;
  fleet.num_uavs = uavs;
  const Scenario s = generate(seed, ues, fleet, ChannelParams{});
  save(s, path);
  out << "wrote " << path << " (hash " << scenario_hash(s) << ")\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"UAV-assisted edge computing deployment optimizer"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Optimize one scenario");
  solve_cmd->add_option("--scenario", sa.scenario, "Scenario JSON file")->required();
  solve_cmd->add_option("--method", sa.method, "proposed, hpo, vpo, clbo or all")
      ->check(CLI::IsMember({"proposed", "hpo", "vpo", "clbo", "all"}));
  solve_cmd->add_option("--seed", sa.seed, "Seed for the random restarts");
  solve_cmd->add_option("--max-iters", sa.max_iters, "Outer iteration limit");
  solve_cmd->add_option("--tol", sa.tol, "Relative tolerance on mu");
  solve_cmd->add_option("--restarts", sa.restarts, "Random restarts");
  solve_cmd->add_option("--out", sa.out, "Output directory")->required();

  std::string spec_path, sweep_out;
  int jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep_cmd->add_option("--spec", spec_path, "Sweep spec JSON file")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();
  sweep_cmd->add_option("--jobs", jobs, "Concurrent runs (0 = hardware threads)")
      ->check(CLI::NonNegativeNumber);

  std::string level = "fast", fault = "none";
  auto* verify_cmd = app.add_subcommand("verify", "Run the numerical verification suites");
  verify_cmd->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify_cmd->add_option("--inject-fault", fault, "Corrupt a check on purpose (psi-sign)")
      ->check(CLI::IsMember({"none", "psi-sign"}));

  int ues = 30, uavs = 5;
  std::uint64_t seed = 1;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random scenario");
  gen_cmd->add_option("--ues", ues, "Number of UEs")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--uavs", uavs, "Number of UAVs")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", seed, "Scenario seed");
  gen_cmd->add_option("--out", gen_out, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa, out);
    if (*sweep_cmd) {
      const int n = jobs == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                              : jobs;
      return cmd_sweep(spec_path, sweep_out, n, out);
    }
    if (*verify_cmd) return cmd_verify(level, fault, out);
    if (*gen_cmd) return cmd_gen(ues, uavs, seed, gen_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace uavmec
