#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "uavmec/deployment.hpp"
#include "uavmec/placement.hpp"
#include "uavmec/scenario.hpp"

namespace uavmec {

enum class Method { Proposed, Hpo, Vpo, Clbo };

std::string_view to_string(Method method);
/// Accepts "proposed", "hpo", "vpo", "clbo"; throws std::invalid_argument.
Method parse_method(std::string_view name);

struct OptimizerConfig {
  int max_outer_iters = 50;
  double rel_tol = 1e-4;
  int restarts = 3;
  std::uint64_t seed = 1;
  double hpo_altitude_m = 60.0;
  int kmeans_max_iters = 100;
  PlacementOptions placement;
};

void validate(const OptimizerConfig& config);

struct CompletionTimes {
  double mu = 0.0;
  std::vector<double> per_uav;
};

/// Per-UAV sum of upload + compute times of the UEs assigned to it (zero for
/// an idle UAV) and their maximum.
CompletionTimes completion_time(const Scenario& scenario, const Deployment& deployment,
                                const Association& association,
                                RateModel model = RateModel::Rician);

struct SolveReport {
  Method method = Method::Proposed;
  std::vector<double> mu_trace;  // completion time after each outer iteration
  double mu = 0.0;               // under the Rician model
  double mu_model = 0.0;         // under the method's own rate model (CLBO: LoS)
  Deployment deployment;
  Association association;
  std::vector<double> per_uav_times;
  int iterations = 0;
  double wall_ms = 0.0;
  bool converged = false;
  int restart_index = 0;         // which random start produced this report
  int association_regressions = 0;  // LP+rounding candidates rejected as worse
  // Per UE, the relaxed elevation sine v and rate z (bits/s) of the last
  // accepted subproblem step that served it; NaN when no step was accepted
  // (and v is always NaN under the LoS model).
  std::vector<double> relaxed_elevation;
  std::vector<double> relaxed_rate;
};

/// Uniform random deployment inside the box.
Deployment random_deployment(const Box& box, int num_uavs, std::mt19937_64& rng);

/// LP relaxation + rounding at the given deployment.
Association associate(const Scenario& scenario, const Deployment& deployment,
                      RateModel model = RateModel::Rician);

/// Block-coordinate descent: association, horizontal SCA step, vertical SCA
/// step, repeated until the relative change of mu drops below rel_tol or
/// max_outer_iters is hit. Best of `restarts` random starts.
SolveReport solve_proposed(const Scenario& scenario, const OptimizerConfig& config = {});

/// As solve_proposed with every altitude pinned at hpo_altitude_m and the
/// vertical block skipped.
SolveReport solve_hpo(const Scenario& scenario, const OptimizerConfig& config = {});

/// k-means centroids fix the horizontal positions and the association
/// (nearest centroid); only altitudes are optimized.
SolveReport solve_vpo(const Scenario& scenario, const OptimizerConfig& config = {});

/// Full block-coordinate descent under the pure LoS rate. The report's mu is
/// the resulting deployment re-evaluated under the Rician model; mu_model is
/// its LoS value.
SolveReport solve_clbo(const Scenario& scenario, const OptimizerConfig& config = {});

SolveReport solve(Method method, const Scenario& scenario, const OptimizerConfig& config = {});

struct KMeansResult {
  std::vector<Point2> centroids;
  std::vector<int> labels;
  std::vector<double> sse_trace;  // within-cluster SSE after each Lloyd step
  int iterations = 0;
};

/// Lloyd's iterations from k-means++ seeding; stops at a label fixpoint or
/// after max_iters. Throws std::invalid_argument when k > points.size().
KMeansResult kmeans(const std::vector<Point2>& points, int k, std::uint64_t seed,
                    int max_iters = 100);

}  // namespace uavmec
