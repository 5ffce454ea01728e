#include "uavmec/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>

#include "uavmec/association.hpp"
#include "uavmec/optimizer.hpp"
#include "uavmec/oracle.hpp"

namespace uavmec {
namespace {

struct Budget {
  int scenarios;
  long long samples;
  int fd_points;
  int hessian_points;
  int lp_instances;
  int grid_instances;
  double grid_h_step;
  double grid_v_step;
  int grid_restarts;
};

constexpr Budget kFast{3, 10000, 1000, 1000, 200, 2, 2.0, 1.0, 5};
constexpr Budget kFull{10, 10000, 1000, 1000, 1000, 10, 1.0, 0.5, 5};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Scenario check_scenario(std::uint64_t seed, int n, int m) {
  return generate(seed, n, FleetConfig{m, 2e9, Box{}}, ChannelParams{});
}

CheckResult bound_domination(const Budget& b, Fault fault) {
  oracle::DominationOptions opt;
  opt.flip_coefficient_sign = fault == Fault::PsiSign;
  double worst = -1.0, gap = 0.0;
  long long total = 0;
  for (int k = 0; k < b.scenarios; ++k) {
    const auto seed = static_cast<std::uint64_t>(100 + k);
    const Scenario s = check_scenario(seed, 20, 3);
    std::mt19937_64 rng(seed);
    const UavPosition e{{uniform(rng, 0, 100), uniform(rng, 0, 100)}, uniform(rng, 40, 80)};
    const auto r = oracle::bound_domination_sample(s, e, b.samples, seed, opt);
    worst = std::max(worst, r.max_violation());
    gap = std::max(gap, r.expansion_gap);
    total += r.samples;
  }
  CheckResult c{"bound-domination", worst <= 1e-9 && gap <= 1e-9, "", 0.0};
  c.detail = fmt("max violation %.3e, expansion gap %.3e, ", worst, gap) +
             std::to_string(total) + " samples per bound";
  return c;
}

CheckResult coefficient_fd(const Budget& b) {
  const Scenario s = check_scenario(7, 50, 1);
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int k = 0; k < b.fd_points; ++k) {
    const Ue& ue = s.ues[static_cast<std::size_t>(k) % s.ues.size()];
    const UavPosition e{{uniform(rng, 0, 100), uniform(rng, 0, 100)}, uniform(rng, 40, 80)};
    worst = std::max({worst, oracle::coefficient_fd_error(e, ue, s.channel, false),
                      oracle::coefficient_fd_error(e, ue, s.channel, true)});
  }
  return {"coefficient-finite-difference", worst <= 1e-6,
          fmt("max relative error %.3e over %.0f expansion points", worst, b.fd_points), 0.0};
}

CheckResult elevation_convexity(const Budget& b) {
  std::mt19937_64 rng(5);
  double lowest = 1.0;
  for (int k = 0; k < b.hessian_points; ++k) {
    const double h = uniform(rng, 40.0, 80.0);
    const double a3 = uniform(rng, 0.0, 2e4);
    lowest = std::min(lowest, oracle::elevation_constraint_min_eigenvalue(h, a3));
  }
  return {"elevation-convexity", lowest >= -1e-12,
          fmt("smallest Hessian eigenvalue %.3e over %.0f points", lowest, b.hessian_points), 0.0};
}

CheckResult association_relaxation(const Budget& b) {
  std::mt19937_64 rng(3);
  int bad = 0;
  for (int k = 0; k < b.lp_instances; ++k) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int m = 1 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd t(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) t(i, j) = uniform(rng, 0.1, 3.0);
    const FractionalAssociation f = solve_relaxed(t);
    const auto exact = oracle::enumerate_associations(t);
    const Association a = round_association(f);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < n; ++i) load(a.uav_of(i)) += t(i, a.uav_of(i));
    if (f.mu > exact.mu + 1e-9 || load.maxCoeff() < exact.mu - 1e-12) ++bad;
  }
  return {"association-relaxation", bad == 0,
          std::to_string(bad) + " of " + std::to_string(b.lp_instances) +
              " instances break LP <= exact <= rounded", 0.0};
}

CheckResult small_instance_grid(const Budget& b) {
  OptimizerConfig cfg;
  cfg.restarts = b.grid_restarts;
  double worst = 0.0;
  for (int k = 0; k < b.grid_instances; ++k) {
    const int n = 1 + (k / 2) % 4;
    const int m = 1 + k % 2;
    const Scenario s = check_scenario(static_cast<std::uint64_t>(500 + k), n, m);
    const auto grid = oracle::grid_search(s, {b.grid_h_step, b.grid_v_step, s.fleet.box});
    const SolveReport r = solve_proposed(s, cfg);
    worst = std::max(worst, r.mu / grid.mu);
  }
  return {"small-instance-grid", worst <= 1.10,
          fmt("worst proposed / grid ratio %.5f over %.0f instances", worst, b.grid_instances),
          0.0};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opt,
                                          const std::function<void(const CheckResult&)>& on_result) {
  const Budget& b = opt.level == VerifyLevel::Full ? kFull : kFast;
  const std::vector<std::pair<std::string, std::function<CheckResult()>>> checks{
      {"bound-domination", [&] { return bound_domination(b, opt.fault); }},
      {"coefficient-finite-difference", [&] { return coefficient_fd(b); }},
      {"elevation-convexity", [&] { return elevation_convexity(b); }},
      {"association-relaxation", [&] { return association_relaxation(b); }},
      {"small-instance-grid", [&] { return small_instance_grid(b); }},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, run] : checks) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {name, false, std::string("exception: ") + e.what(), 0.0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace uavmec
