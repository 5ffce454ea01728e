#include "uavmec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "uavmec/optimizer.hpp"

namespace uavmec::oracle {
namespace {

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long long k = 0; k < n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  if (out.back() < hi - 1e-9) out.push_back(hi);
  return out;
}

// M^n, saturating at limit + 1.
long long capped_power(long long m, int n, long long limit) {
  long long r = 1;
  for (int i = 0; i < n; ++i) {
    r *= m;
    if (r > limit) return limit + 1;
  }
  return r;
}

struct SubsetBest {
  double time;
  UavPosition position;
};

}  // namespace

OracleResult grid_search(const Scenario& s, const GridSpec& grid) {
  if (!(grid.horizontal_step > 0.0) || !(grid.vertical_step > 0.0))
    throw std::invalid_argument("grid steps must be positive");
  const int n = s.num_ues();
  const int m = s.num_uavs();
  if (n > 30 || capped_power(m, n, 100000) > 100000)
    throw TooLarge("grid_search: more than 1e5 associations");
  const Box& b = grid.box;
  const auto xs = axis(b.x_min, b.x_max, grid.horizontal_step);
  const auto ys = axis(b.y_min, b.y_max, grid.horizontal_step);
  const auto hs = b.h_max > b.h_min ? axis(b.h_min, b.h_max, grid.vertical_step)
                                    : std::vector<double>{b.h_min};
  const double nodes = static_cast<double>(xs.size()) * ys.size() * hs.size();
  if (nodes > 1e7) throw TooLarge("grid_search: more than 1e7 grid nodes");

  OracleResult result;
  std::unordered_map<unsigned, SubsetBest> cache;
  const UavPosition idle{{b.x_min, b.y_min}, b.h_min};
  auto best_for = [&](unsigned mask) -> const SubsetBest& {
    auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    std::vector<int> served;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) served.push_back(i);
    SubsetBest best{0.0, idle};
    if (!served.empty()) {
      best.time = std::numeric_limits<double>::infinity();
      for (double x : xs)
        for (double y : ys)
          for (double h : hs) {
            const UavPosition p{{x, y}, h};
            const double t = uav_completion_time(s, served, p);
            if (t < best.time) best = {t, p};
          }
      result.nodes_evaluated += static_cast<long long>(nodes);
    }
    return cache.emplace(mask, best).first->second;
  };

  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  double best_mu = std::numeric_limits<double>::infinity();
  std::vector<int> best_digits;
  Deployment best_dep;
  for (;;) {
    std::vector<unsigned> masks(static_cast<std::size_t>(m), 0u);
    for (int i = 0; i < n; ++i) masks[digits[i]] |= 1u << i;
    double mu = 0.0;
    Deployment dep;
    for (int j = 0; j < m; ++j) {
      const SubsetBest& sb = best_for(masks[j]);
      mu = std::max(mu, sb.time);
      dep.uavs.push_back(sb.position);
    }
    if (mu < best_mu) {
      best_mu = mu;
      best_digits = digits;
      best_dep = dep;
    }
    int i = 0;
    while (i < n && ++digits[i] == m) digits[i++] = 0;
    if (i == n) break;
  }
  result.deployment = best_dep;
  result.association = Association(best_digits, m);
  result.mu = completion_time(s, result.deployment, result.association).mu;
  return result;
}

EnumerationResult enumerate_associations(const Eigen::MatrixXd& times) {
  const int n = static_cast<int>(times.rows());
  const int m = static_cast<int>(times.cols());
  if (n == 0 || m == 0) throw std::invalid_argument("enumerate_associations: empty matrix");
  if (capped_power(m, n, 1000000) > 1000000)
    throw TooLarge("enumerate_associations: more than 1e6 associations");
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  std::vector<double> load(static_cast<std::size_t>(m));
  EnumerationResult best;
  best.mu = std::numeric_limits<double>::infinity();
  for (;;) {
    std::fill(load.begin(), load.end(), 0.0);
    for (int i = 0; i < n; ++i) load[digits[i]] += times(i, digits[i]);
    const double mu = *std::max_element(load.begin(), load.end());
    if (mu < best.mu) {
      best.mu = mu;
      best.association = Association(digits, m);
    }
    int i = 0;
    while (i < n && ++digits[i] == m) digits[i++] = 0;
    if (i == n) break;
  }
  return best;
}

double finite_diff_check(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& gradient, const Eigen::VectorXd& point,
                         double rel_step) {
  const double floor = 1e-12 * gradient.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < point.size(); ++k) {
    const double step = rel_step * std::max(std::abs(point(k)), 1.0);
    Eigen::VectorXd lo = point, hi = point;
    lo(k) -= step;
    hi(k) += step;
    const double fd = (f(hi) - f(lo)) / (2.0 * step);
    const double scale = std::max({std::abs(gradient(k)), floor,
                                   std::numeric_limits<double>::min()});
    worst = std::max(worst, std::abs(fd - gradient(k)) / scale);
  }
  return worst;
}

double rate_composite(double x, double y, const LinkExpansion& e, const Ue& ue,
                      const ChannelParams& c) {
  const double big_x = 1.0 + angle_term(e.v_hat, c);
  const double gamma = snr_scale(ue.tx_power_w, c);
  const double snr = (c.k1 + c.k2 / (x + big_x)) * gamma /
                     std::pow(y + e.dist_sq, 0.5 * c.pathloss_exp);
  return c.bandwidth_hz * std::log2(1.0 + snr);
}

double coefficient_fd_error(UavPosition expansion, const Ue& ue, const ChannelParams& c,
                            bool vertical, double rel_step) {
  const LinkExpansion e = expand_link(expansion, ue, c);
  const BoundCoefficients k = vertical ? phi_coefficients(expansion, ue, c)
                                       : psi_coefficients(expansion, ue, c);
  // Differentiate in the shifted coordinates (x + X, y + Y) so the relative
  // step scales with X and Y rather than with the zero expansion offset.
  const double big_x = 1.0 + angle_term(e.v_hat, c);
  auto f = [&](const Eigen::VectorXd& p) {
    return rate_composite(p(0) - big_x, p(1) - e.dist_sq, e, ue, c);
  };
  Eigen::Vector2d grad(-k.exp_coef, -k.dist_coef);
  return finite_diff_check(f, grad, Eigen::Vector2d(big_x, e.dist_sq), rel_step);
}

double DominationReport::max_violation() const {
  return std::max({horizontal_rate, elevation, vertical_rate});
}

DominationReport bound_domination_sample(const Scenario& s, UavPosition exp,
                                         long long n_samples, std::uint64_t seed,
                                         const DominationOptions& options) {
  if (s.ues.empty()) throw std::invalid_argument("bound_domination_sample: no UEs");
  const ChannelParams& c = s.channel;
  const Box& b = s.fleet.box;
  std::mt19937_64 rng(seed);
  const double sign = options.flip_coefficient_sign ? -1.0 : 1.0;
  auto flipped = [&](BoundCoefficients k) {
    k.exp_coef *= sign;
    k.dist_coef *= sign;
    return k;
  };

  DominationReport rep;
  for (const Ue& ue : s.ues) {
    const LinkExpansion e = expand_link(exp, ue, c);
    const auto psi = flipped(psi_coefficients(exp, ue, c));
    const auto phi = flipped(phi_coefficients(exp, ue, c));
    const double v_true = e.v_hat;
    rep.expansion_gap = std::max(
        {rep.expansion_gap,
         std::abs(r_lb_horizontal(exp.q, v_true, exp, ue, psi, c) - e.r_hat) / e.r_hat,
         std::abs(r_lb_vertical(exp.h, v_true, exp, ue, phi, c) - e.r_hat) / e.r_hat,
         std::abs(v_lb(exp.q, exp, ue) - v_true)});
  }
  for (long long k = 0; k < n_samples; ++k) {
    const Ue& ue = s.ues[static_cast<std::size_t>(rng() % s.ues.size())];
    const Point2 q{uniform(rng, b.x_min, b.x_max), uniform(rng, b.y_min, b.y_max)};
    const double h = b.h_max > b.h_min ? uniform(rng, b.h_min, b.h_max) : b.h_min;
    const double v = uniform(rng, 1e-6, 1.0);
    const auto psi = flipped(psi_coefficients(exp, ue, c));
    const auto phi = flipped(phi_coefficients(exp, ue, c));

    const double hs = squared_distance(q, ue.position);
    const double r_h = outage_rate(hs, exp.h, v, ue.tx_power_w, c);
    rep.horizontal_rate =
        std::max(rep.horizontal_rate, (r_lb_horizontal(q, v, exp, ue, psi, c) - r_h) / r_h);

    const double v_true = exp.h / std::sqrt(hs + exp.h * exp.h);
    double v_bound = v_lb(q, exp, ue);
    if (options.flip_coefficient_sign) v_bound = 2.0 * v_lb(exp.q, exp, ue) - v_bound;
    rep.elevation = std::max(rep.elevation, v_bound - v_true);

    const double hs_hat = squared_distance(exp.q, ue.position);
    const double r_v = outage_rate(hs_hat, h, v, ue.tx_power_w, c);
    rep.vertical_rate =
        std::max(rep.vertical_rate, (r_lb_vertical(h, v, exp, ue, phi, c) - r_v) / r_v);
    ++rep.samples;
  }
  return rep;
}

Eigen::Matrix2d elevation_constraint_hessian_fd(double h, double a3, double step) {
  // Central differences of the analytic gradient (1, -a3 / (a3 + H^2)^1.5);
  // second differences of the value would drown the curvature in rounding.
  auto grad = [a3](double, double hh) {
    return Eigen::Vector2d(1.0, -a3 / std::pow(a3 + hh * hh, 1.5));
  };
  const double v = 0.5;
  Eigen::Matrix2d H;
  H.col(0) = (grad(v + step, h) - grad(v - step, h)) / (2.0 * step);
  H.col(1) = (grad(v, h + step) - grad(v, h - step)) / (2.0 * step);
  return 0.5 * (H + H.transpose());
}

double elevation_constraint_min_eigenvalue(double h, double a3) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(elevation_constraint_hessian_fd(h, a3));
  return es.eigenvalues().minCoeff();
}

}  // namespace uavmec::oracle
