#include "uavmec/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "uavmec/association.hpp"

namespace uavmec {
namespace {

constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct BcdMode {
  RateModel model = RateModel::Rician;
  bool optimize_altitude = true;
};

// Nearest-in-time fallback when the association LP cannot be solved.
Association argmin_association(const Eigen::MatrixXd& times) {
  std::vector<int> pick(static_cast<std::size_t>(times.rows()));
  for (Eigen::Index i = 0; i < times.rows(); ++i) {
    Eigen::Index j = 0;
    times.row(i).minCoeff(&j);
    pick[i] = static_cast<int>(j);
  }
  return Association(std::move(pick), static_cast<int>(times.cols()));
}

// Keeps the relaxed elevation and rate variables of the last accepted step
// for every UE it served.
void record_relaxed(SolveReport& rep, std::span<const int> served, const SubproblemSolution& sol) {
  if (!sol.accepted || sol.z.size() != served.size()) return;
  for (std::size_t a = 0; a < served.size(); ++a) {
    rep.relaxed_rate[served[a]] = sol.z[a];
    rep.relaxed_elevation[served[a]] = sol.v.empty() ? kNoValue : sol.v[a];
  }
}

bool relative_change_below(double prev, double cur, double tol) {
  return std::abs(prev - cur) <= tol * std::max(std::abs(prev), 1e-300);
}

SolveReport run_bcd(const Scenario& s, Deployment dep, const OptimizerConfig& cfg, BcdMode mode) {
  SolveReport rep;
  rep.relaxed_elevation.assign(s.ues.size(), kNoValue);
  rep.relaxed_rate.assign(s.ues.size(), kNoValue);
  PlacementOptions popt = cfg.placement;
  popt.model = mode.model;
  const int m = s.num_uavs();

  Association assoc;
  bool have_assoc = false;
  double incumbent = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.max_outer_iters; ++r) {
    // Association block. A candidate that is worse than the incumbent at the
    // current deployment is dropped so the post-rounding trace stays monotone.
    Association candidate;
    try {
      candidate = associate(s, dep, mode.model);
    } catch (const std::runtime_error&) {
      candidate = argmin_association(service_time_matrix(s, dep, mode.model));
    }
    if (!have_assoc) {
      assoc = candidate;
      have_assoc = true;
    } else if (candidate != assoc) {
      const double cand_mu = completion_time(s, dep, candidate, mode.model).mu;
      const double inc_mu = completion_time(s, dep, assoc, mode.model).mu;
      if (cand_mu <= inc_mu) {
        assoc = candidate;
      } else {
        ++rep.association_regressions;
      }
    }

    int attempted = 0, solved = 0;
    std::vector<std::vector<int>> served(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) served[j] = assoc.served_by(j);

    for (int j = 0; j < m; ++j) {
      if (served[j].empty()) continue;
      ++attempted;
      const SubproblemSolution sol = solve_horizontal(s, served[j], dep.uavs[j], popt);
      solved += sol.status == convex::SolveCode::Optimal;
      dep.uavs[j] = sol.position;
      record_relaxed(rep, served[j], sol);
    }
    if (mode.optimize_altitude) {
      for (int j = 0; j < m; ++j) {
        if (served[j].empty()) continue;
        ++attempted;
        const SubproblemSolution sol = solve_vertical(s, served[j], dep.uavs[j], popt);
        solved += sol.status == convex::SolveCode::Optimal;
        dep.uavs[j] = sol.position;
        record_relaxed(rep, served[j], sol);
      }
    }

    const double mu = completion_time(s, dep, assoc, mode.model).mu;
    rep.mu_trace.push_back(mu);
    if (attempted > 0 && solved == 0) break;  // every block failed: stop, not converged
    if (r > 0 && relative_change_below(incumbent, mu, cfg.rel_tol)) {
      rep.converged = true;
      break;
    }
    incumbent = mu;
  }

  rep.iterations = static_cast<int>(rep.mu_trace.size());
  rep.deployment = std::move(dep);
  rep.association = std::move(assoc);
  rep.mu_model = completion_time(s, rep.deployment, rep.association, mode.model).mu;
  return rep;
}

void finish_report(const Scenario& s, SolveReport& rep, Method method,
                   std::chrono::steady_clock::time_point start) {
  rep.method = method;
  const CompletionTimes truth = completion_time(s, rep.deployment, rep.association);
  rep.mu = truth.mu;
  rep.per_uav_times = truth.per_uav;
  rep.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

SolveReport best_of_restarts(const Scenario& s, const OptimizerConfig& cfg, BcdMode mode,
                             double fixed_altitude) {
  std::mt19937_64 rng(cfg.seed);
  SolveReport best;
  bool have = false;
  for (int k = 0; k < cfg.restarts; ++k) {
    Deployment init = random_deployment(s.fleet.box, s.num_uavs(), rng);
    if (!mode.optimize_altitude)
      for (UavPosition& u : init.uavs) u.h = s.fleet.box.clamp_h(fixed_altitude);
    SolveReport rep = run_bcd(s, std::move(init), cfg, mode);
    rep.restart_index = k;
    if (!have || rep.mu_model < best.mu_model) {
      best = std::move(rep);
      have = true;
    }
  }
  return best;
}

double sse(const std::vector<Point2>& pts, const std::vector<Point2>& centroids,
           const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) total += squared_distance(pts[i], centroids[labels[i]]);
  return total;
}

int nearest(Point2 p, const std::vector<Point2>& centroids) {
  int best = 0;
  double best_d = squared_distance(p, centroids[0]);
  for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Proposed: return "proposed";
    case Method::Hpo: return "hpo";
    case Method::Vpo: return "vpo";
    case Method::Clbo: return "clbo";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "proposed") return Method::Proposed;
  if (name == "hpo") return Method::Hpo;
  if (name == "vpo") return Method::Vpo;
  if (name == "clbo") return Method::Clbo;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

void validate(const OptimizerConfig& c) {
  if (c.max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
  if (!(c.rel_tol > 0)) throw std::invalid_argument("rel_tol must be > 0");
  if (c.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (c.kmeans_max_iters < 1) throw std::invalid_argument("kmeans_max_iters must be >= 1");
}

CompletionTimes completion_time(const Scenario& s, const Deployment& d, const Association& a,
                                RateModel model) {
  if (a.num_ues() != s.num_ues() || a.num_uavs() != d.size())
    throw std::invalid_argument("completion_time: association shape does not match");
  CompletionTimes out;
  out.per_uav.assign(static_cast<std::size_t>(d.size()), 0.0);
  for (int i = 0; i < s.num_ues(); ++i) {
    const Ue& u = s.ues[i];
    const UavPosition& p = d.uavs[a.uav_of(i)];
    out.per_uav[a.uav_of(i)] +=
        u.data_bits / link_rate(model, p.q, p.h, u.position, u.tx_power_w, s.channel) +
        u.cycles / s.fleet.cpu_hz;
  }
  out.mu = out.per_uav.empty() ? 0.0 : *std::max_element(out.per_uav.begin(), out.per_uav.end());
  return out;
}

Deployment random_deployment(const Box& box, int num_uavs, std::mt19937_64& rng) {
  Deployment d;
  for (int j = 0; j < num_uavs; ++j) {
    UavPosition p;
    p.q.x = uniform(rng, box.x_min, box.x_max);
    p.q.y = uniform(rng, box.y_min, box.y_max);
    p.h = uniform(rng, box.h_min, box.h_max);
    d.uavs.push_back(p);
  }
  return d;
}

Association associate(const Scenario& s, const Deployment& d, RateModel model) {
  return round_association(solve_relaxed(service_time_matrix(s, d, model)));
}

SolveReport solve_proposed(const Scenario& s, const OptimizerConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  SolveReport rep = best_of_restarts(s, cfg, BcdMode{RateModel::Rician, true}, 0.0);
  finish_report(s, rep, Method::Proposed, start);
  return rep;
}

SolveReport solve_hpo(const Scenario& s, const OptimizerConfig& cfg) {
  validate(cfg);
  const Box& box = s.fleet.box;
  if (!(cfg.hpo_altitude_m >= box.h_min && cfg.hpo_altitude_m <= box.h_max))
    throw std::invalid_argument("hpo_altitude_m: must lie within [h_min, h_max]");
  const auto start = std::chrono::steady_clock::now();
  SolveReport rep = best_of_restarts(s, cfg, BcdMode{RateModel::Rician, false}, cfg.hpo_altitude_m);
  finish_report(s, rep, Method::Hpo, start);
  return rep;
}

SolveReport solve_clbo(const Scenario& s, const OptimizerConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  SolveReport rep = best_of_restarts(s, cfg, BcdMode{RateModel::LineOfSight, true}, 0.0);
  finish_report(s, rep, Method::Clbo, start);
  return rep;
}

SolveReport solve_vpo(const Scenario& s, const OptimizerConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  const Box& box = s.fleet.box;
  std::vector<Point2> pts;
  for (const Ue& u : s.ues) pts.push_back(u.position);
  const int m = s.num_uavs();
  const int k = std::min(m, s.num_ues());

  // Keep the lowest-SSE clustering over `restarts` k-means++ seedings.
  KMeansResult clusters;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    KMeansResult km = kmeans(pts, k, cfg.seed + static_cast<std::uint64_t>(r), cfg.kmeans_max_iters);
    const double e = sse(pts, km.centroids, km.labels);
    if (e < best_sse) {
      best_sse = e;
      clusters = std::move(km);
    }
  }

  Point2 mean{0.0, 0.0};
  for (const Point2& p : pts) {
    mean.x += p.x / static_cast<double>(pts.size());
    mean.y += p.y / static_cast<double>(pts.size());
  }
  Deployment dep;
  const double h0 = 0.5 * (box.h_min + box.h_max);
  for (int j = 0; j < m; ++j) {
    const Point2 q = j < k ? clusters.centroids[j] : mean;  // surplus UAVs idle
    dep.uavs.push_back(UavPosition{{box.clamp_x(q.x), box.clamp_y(q.y)}, h0});
  }
  const Association assoc(clusters.labels, m);

  SolveReport rep;
  rep.relaxed_elevation.assign(s.ues.size(), kNoValue);
  rep.relaxed_rate.assign(s.ues.size(), kNoValue);
  double prev = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.max_outer_iters; ++r) {
    int attempted = 0, solved = 0;
    for (int j = 0; j < m; ++j) {
      const std::vector<int> served = assoc.served_by(j);
      if (served.empty()) continue;
      ++attempted;
      const SubproblemSolution sol = solve_vertical(s, served, dep.uavs[j], cfg.placement);
      solved += sol.status == convex::SolveCode::Optimal;
      dep.uavs[j] = sol.position;
      record_relaxed(rep, served, sol);
    }
    const double mu = completion_time(s, dep, assoc).mu;
    rep.mu_trace.push_back(mu);
    if (attempted > 0 && solved == 0) break;
    if (r > 0 && relative_change_below(prev, mu, cfg.rel_tol)) {
      rep.converged = true;
      break;
    }
    prev = mu;
  }
  rep.iterations = static_cast<int>(rep.mu_trace.size());
  rep.deployment = std::move(dep);
  rep.association = assoc;
  rep.mu_model = completion_time(s, rep.deployment, rep.association).mu;
  finish_report(s, rep, Method::Vpo, start);
  return rep;
}

SolveReport solve(Method method, const Scenario& s, const OptimizerConfig& cfg) {
  switch (method) {
    case Method::Proposed: return solve_proposed(s, cfg);
    case Method::Hpo: return solve_hpo(s, cfg);
    case Method::Vpo: return solve_vpo(s, cfg);
    case Method::Clbo: return solve_clbo(s, cfg);
  }
  throw std::invalid_argument("solve: unknown method");
}

KMeansResult kmeans(const std::vector<Point2>& pts, int k, std::uint64_t seed, int max_iters) {
  const int n = static_cast<int>(pts.size());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= number of points");
  std::mt19937_64 rng(seed);
  KMeansResult out;

  // k-means++ seeding.
  auto pick_index = [&](double u) { return std::min(n - 1, static_cast<int>(u * n)); };
  out.centroids.push_back(pts[pick_index(uniform01(rng))]);
  std::vector<double> d2(static_cast<std::size_t>(n));
  while (static_cast<int>(out.centroids.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d2[i] = squared_distance(pts[i], out.centroids[nearest(pts[i], out.centroids)]);
      total += d2[i];
    }
    int chosen = -1;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (int i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        chosen = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    }
    // All remaining points coincide with centroids: reuse one.
    out.centroids.push_back(pts[chosen >= 0 ? chosen : pick_index(uniform01(rng))]);
  }

  out.labels.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int c = nearest(pts[i], out.centroids);
      changed |= c != out.labels[i];
      out.labels[i] = c;
    }
    ++out.iterations;
    if (!changed && it > 0) break;
    std::vector<Point2> sum(static_cast<std::size_t>(k), Point2{0.0, 0.0});
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      sum[out.labels[i]].x += pts[i].x;
      sum[out.labels[i]].y += pts[i].y;
      ++count[out.labels[i]];
    }
    for (int c = 0; c < k; ++c)
      if (count[c] > 0) out.centroids[c] = Point2{sum[c].x / count[c], sum[c].y / count[c]};
    out.sse_trace.push_back(sse(pts, out.centroids, out.labels));
  }
  for (int i = 0; i < n; ++i) out.labels[i] = nearest(pts[i], out.centroids);
  return out;
}

}  // namespace uavmec
