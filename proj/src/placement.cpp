#include "uavmec/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavmec {
namespace {

struct LogisticPair {
  double k1;
  double k2;
};

LogisticPair effective_logistic(RateModel model, const ChannelParams& c) {
  // The LoS rate is the Rician closed form with the angle factor pinned at 1.
  return model == RateModel::Rician ? LogisticPair{c.k1, c.k2} : LogisticPair{1.0, 0.0};
}

BoundCoefficients rate_partials(double v_hat, double dist_sq, double gamma, RateModel model,
                                const ChannelParams& c) {
  const auto [k1, k2] = effective_logistic(model, c);
  const double big_x = 1.0 + angle_term(v_hat, c);
  const double scaled = k1 * big_x + k2;
  const double den = gamma * scaled + big_x * std::pow(dist_sq, 0.5 * c.pathloss_exp);
  BoundCoefficients out;
  out.exp_coef = gamma * k2 * c.bandwidth_hz / (std::numbers::ln2 * big_x * den);
  out.dist_coef = gamma * c.pathloss_exp * c.bandwidth_hz * scaled /
                  (2.0 * std::numbers::ln2 * dist_sq * den);
  return out;
}

// Pulls a coordinate a hair inside [lo, hi] so the barrier can start there.
double strictly_inside(double x, double lo, double hi) {
  const double margin = 1e-7 * (hi - lo);
  return std::clamp(x, lo + margin, hi - margin);
}

// Layout of the per-UAV subproblem vector: [position..., v..., zeta..., mu].
// zeta_a = z_a / r_hat_a keeps every rate variable near 1.
struct Layout {
  int npos;
  int k;
  bool angle;
  int v(int a) const { return npos + a; }
  int zeta(int a) const { return npos + (angle ? k : 0) + a; }
  int mu() const { return npos + (angle ? 2 * k : k); }
  int size() const { return mu() + 1; }
};

struct LinkData {
  const Ue* ue;
  LinkExpansion e;
  BoundCoefficients coef;
  double exp_hat;
};

convex::SmoothConstraint epigraph_constraint(const Layout& L, const std::vector<LinkData>& links,
                                             double compute_time) {
  convex::SmoothConstraint c;
  std::vector<double> scale;  // D_a / r_hat_a
  for (int a = 0; a < L.k; ++a) {
    c.support.push_back(L.zeta(a));
    scale.push_back(links[a].ue->data_bits / links[a].e.r_hat);
  }
  c.support.push_back(L.mu());
  const int k = L.k;
  c.eval = [scale, compute_time, k](const Eigen::VectorXd& x, Eigen::VectorXd* g,
                                    Eigen::MatrixXd* h) {
    double value = compute_time - x(k);
    for (int a = 0; a < k; ++a) {
      const double zeta = x(a);
      value += scale[a] / zeta;
      if (g) (*g)(a) = -scale[a] / (zeta * zeta);
      if (h) (*h)(a, a) = 2.0 * scale[a] / (zeta * zeta * zeta);
    }
    if (g) (*g)(k) = -1.0;
    return value;
  };
  return c;
}

// zeta - 1 + a (exp(-(k3 + k4 v)) - exp_hat) + b * (distance term change) <= 0,
// with the distance term supplied by `dist` as (value, grad, hess-diag) over
// the position variables at the front of the local vector.
template <class DistanceTerm>
convex::SmoothConstraint rate_bound_constraint(std::vector<int> support, bool angle, double a,
                                               double b, double exp_hat, int npos,
                                               const ChannelParams& ch, DistanceTerm dist) {
  convex::SmoothConstraint c;
  c.support = std::move(support);
  const double k3 = ch.k3, k4 = ch.k4;
  c.eval = [=](const Eigen::VectorXd& x, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
    const int iz = angle ? npos + 1 : npos;
    double value = x(iz) - 1.0;
    if (g) (*g)(iz) = 1.0;
    value += b * dist(x, g ? g->data() : nullptr, h, b);
    if (angle) {
      const double e = std::exp(-(k3 + k4 * x(npos)));
      value += a * (e - exp_hat);
      if (g) (*g)(npos) = -a * k4 * e;
      if (h) (*h)(npos, npos) = a * k4 * k4 * e;
    }
    return value;
  };
  return c;
}

void finalize(SubproblemSolution& out, const convex::SolveStatus& status, const Layout& L,
              const std::vector<LinkData>& links, UavPosition candidate,
              const Scenario& s, std::span<const int> served, const PlacementOptions& opt) {
  out.status = status.code;
  if (!status.optimal()) return;
  out.candidate = candidate;
  out.mu = status.x(L.mu());
  out.v.clear();
  out.z.clear();
  for (int a = 0; a < L.k; ++a) {
    if (L.angle) out.v.push_back(status.x(L.v(a)));
    out.z.push_back(status.x(L.zeta(a)) * links[a].e.r_hat);
  }
  const double after = uav_completion_time(s, served, candidate, opt.model);
  if (after <= out.time_before + opt.descent_tol) {
    out.position = candidate;
    out.time_after = after;
    out.accepted = true;
  }
}

}  // namespace

double angle_term(double v, const ChannelParams& c) { return std::exp(-(c.k3 + c.k4 * v)); }

LinkExpansion expand_link(UavPosition exp, const Ue& ue, const ChannelParams& c, RateModel model) {
  LinkExpansion e;
  e.horiz_sq = squared_distance(exp.q, ue.position);
  e.dist_sq = e.horiz_sq + exp.h * exp.h;
  e.v_hat = exp.h / std::sqrt(e.dist_sq);
  e.r_hat = model == RateModel::Rician ? outage_rate(e.horiz_sq, exp.h, e.v_hat, ue.tx_power_w, c)
                                       : los_rate(e.horiz_sq, exp.h, ue.tx_power_w, c);
  return e;
}

BoundCoefficients psi_coefficients(UavPosition exp, const Ue& ue, const ChannelParams& c,
                                   RateModel model) {
  const LinkExpansion e = expand_link(exp, ue, c, model);
  return rate_partials(e.v_hat, e.dist_sq, snr_scale(ue.tx_power_w, c), model, c);
}

BoundCoefficients phi_coefficients(UavPosition exp, const Ue& ue, const ChannelParams& c,
                                   RateModel model) {
  // Same expansion point, same partials: only the variable that moves the
  // squared distance differs (H^2 instead of |q - w|^2).
  return psi_coefficients(exp, ue, c, model);
}

double r_lb_horizontal(Point2 q, double v, UavPosition exp, const Ue& ue,
                       const BoundCoefficients& psi, const ChannelParams& c) {
  const LinkExpansion e = expand_link(exp, ue, c);
  return e.r_hat - psi.exp_coef * (angle_term(v, c) - angle_term(e.v_hat, c)) -
         psi.dist_coef * (squared_distance(q, ue.position) - e.horiz_sq);
}

double v_lb(Point2 q, UavPosition exp, const Ue& ue) {
  const double hs_hat = squared_distance(exp.q, ue.position);
  const double d2 = hs_hat + exp.h * exp.h;
  const double v_hat = exp.h / std::sqrt(d2);
  return v_hat - exp.h / (2.0 * d2 * std::sqrt(d2)) * (squared_distance(q, ue.position) - hs_hat);
}

double r_lb_vertical(double h, double v, UavPosition exp, const Ue& ue,
                     const BoundCoefficients& phi, const ChannelParams& c) {
  const LinkExpansion e = expand_link(exp, ue, c);
  return e.r_hat - phi.exp_coef * (angle_term(v, c) - angle_term(e.v_hat, c)) -
         phi.dist_coef * (h * h - exp.h * exp.h);
}

double uav_completion_time(const Scenario& s, std::span<const int> served, UavPosition pos,
                           RateModel model) {
  double t = 0.0;
  for (int i : served) {
    const Ue& u = s.ues[i];
    t += u.data_bits / link_rate(model, pos.q, pos.h, u.position, u.tx_power_w, s.channel) +
         u.cycles / s.fleet.cpu_hz;
  }
  return t;
}

SubproblemSolution solve_horizontal(const Scenario& s, std::span<const int> served,
                                    UavPosition exp, const PlacementOptions& opt) {
  const ChannelParams& ch = s.channel;
  const Box& box = s.fleet.box;
  SubproblemSolution out;
  out.position = out.candidate = exp;
  out.time_before = out.time_after = uav_completion_time(s, served, exp, opt.model);
  if (served.empty()) {
    out.status = convex::SolveCode::Optimal;
    out.accepted = true;
    return out;
  }

  const Layout L{2, static_cast<int>(served.size()), opt.model == RateModel::Rician};
  std::vector<LinkData> links;
  double compute = 0.0;
  for (int i : served) {
    const Ue& u = s.ues[i];
    LinkData d{&u, expand_link(exp, u, ch, opt.model), psi_coefficients(exp, u, ch, opt.model), 0.0};
    d.exp_hat = angle_term(d.e.v_hat, ch);
    links.push_back(d);
    compute += u.cycles / s.fleet.cpu_hz;
  }

  convex::ConvexProgram p(L.size());
  p.objective(L.mu()) = 1.0;
  p.lower(0) = box.x_min;
  p.upper(0) = box.x_max;
  p.lower(1) = box.y_min;
  p.upper(1) = box.y_max;
  p.constraints.push_back(epigraph_constraint(L, links, compute));

  const Point2 q0{strictly_inside(exp.q.x, box.x_min, box.x_max),
                  strictly_inside(exp.q.y, box.y_min, box.y_max)};
  Eigen::VectorXd x0(L.size());
  x0(0) = q0.x;
  x0(1) = q0.y;
  double mu0 = compute;

  for (int a = 0; a < L.k; ++a) {
    const LinkData& d = links[a];
    const Point2 w = d.ue->position;
    const double hs_hat = d.e.horiz_sq;
    // |q - w|^2 - hs_hat over local (qx, qy, ...).
    auto dist = [w, hs_hat](const Eigen::VectorXd& x, double* g, Eigen::MatrixXd* h, double coef) {
      const double dx = x(0) - w.x, dy = x(1) - w.y;
      if (g) {
        g[0] = 2.0 * coef * dx;
        g[1] = 2.0 * coef * dy;
      }
      if (h) {
        (*h)(0, 0) = 2.0 * coef;
        (*h)(1, 1) = 2.0 * coef;
      }
      return dx * dx + dy * dy - hs_hat;
    };

    double v0 = 1.0;
    if (L.angle) {
      p.lower(L.v(a)) = opt.v_floor;
      p.upper(L.v(a)) = 1.0;
      const double c = exp.h / (2.0 * d.e.dist_sq * std::sqrt(d.e.dist_sq));
      const double v_hat = d.e.v_hat;
      convex::SmoothConstraint vc;
      vc.support = {0, 1, L.v(a)};
      vc.eval = [dist, c, v_hat](const Eigen::VectorXd& x, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
        const double value = x(2) - v_hat + c * dist(x, g ? g->data() : nullptr, h, c);
        if (g) (*g)(2) = 1.0;
        return value;
      };
      p.constraints.push_back(std::move(vc));
      v0 = std::clamp(0.999 * std::min(1.0, v_lb(q0, exp, *d.ue)), 2.0 * opt.v_floor, 0.999);
      x0(L.v(a)) = v0;
    }

    const double a_coef = d.coef.exp_coef / d.e.r_hat;
    const double b_coef = d.coef.dist_coef / d.e.r_hat;
    std::vector<int> support{0, 1};
    if (L.angle) support.push_back(L.v(a));
    support.push_back(L.zeta(a));
    p.constraints.push_back(
        rate_bound_constraint(support, L.angle, a_coef, b_coef, d.exp_hat, 2, ch, dist));
    p.lower(L.zeta(a)) = opt.z_min / d.e.r_hat;

    const double lb = d.e.r_hat - d.coef.exp_coef * (angle_term(v0, ch) - d.exp_hat) * L.angle -
                      d.coef.dist_coef * (squared_distance(q0, w) - hs_hat);
    const double zeta0 = std::max(0.999 * lb / d.e.r_hat, 2.0 * opt.z_min / d.e.r_hat);
    x0(L.zeta(a)) = zeta0;
    mu0 += d.ue->data_bits / (zeta0 * d.e.r_hat);
  }
  x0(L.mu()) = mu0 + 1e-3 * std::max(1.0, mu0);

  const convex::SolveStatus status = convex::solve_convex(p, x0, opt.barrier);
  finalize(out, status, L, links, UavPosition{{status.x(0), status.x(1)}, exp.h}, s, served, opt);
  return out;
}

SubproblemSolution solve_vertical(const Scenario& s, std::span<const int> served,
                                  UavPosition exp, const PlacementOptions& opt) {
  const ChannelParams& ch = s.channel;
  const Box& box = s.fleet.box;
  SubproblemSolution out;
  out.position = out.candidate = exp;
  out.time_before = out.time_after = uav_completion_time(s, served, exp, opt.model);
  if (served.empty() || box.h_max - box.h_min <= 0.0) {
    out.status = convex::SolveCode::Optimal;
    out.accepted = true;
    return out;
  }

  const Layout L{1, static_cast<int>(served.size()), opt.model == RateModel::Rician};
  std::vector<LinkData> links;
  double compute = 0.0;
  for (int i : served) {
    const Ue& u = s.ues[i];
    LinkData d{&u, expand_link(exp, u, ch, opt.model), phi_coefficients(exp, u, ch, opt.model), 0.0};
    d.exp_hat = angle_term(d.e.v_hat, ch);
    links.push_back(d);
    compute += u.cycles / s.fleet.cpu_hz;
  }

  convex::ConvexProgram p(L.size());
  p.objective(L.mu()) = 1.0;
  p.lower(0) = box.h_min;
  p.upper(0) = box.h_max;
  p.constraints.push_back(epigraph_constraint(L, links, compute));

  const double h0 = strictly_inside(exp.h, box.h_min, box.h_max);
  const double h_hat_sq = exp.h * exp.h;
  Eigen::VectorXd x0(L.size());
  x0(0) = h0;
  double mu0 = compute;

  auto altitude = [h_hat_sq](const Eigen::VectorXd& x, double* g, Eigen::MatrixXd* h, double coef) {
    if (g) g[0] = 2.0 * coef * x(0);
    if (h) (*h)(0, 0) = 2.0 * coef;
    return x(0) * x(0) - h_hat_sq;
  };

  for (int a = 0; a < L.k; ++a) {
    const LinkData& d = links[a];
    const double horiz = d.e.horiz_sq;  // q is fixed, so this is exact

    double v0 = 1.0;
    if (L.angle) {
      p.lower(L.v(a)) = opt.v_floor;
      p.upper(L.v(a)) = 1.0;
      convex::SmoothConstraint vc;
      vc.support = {0, L.v(a)};
      vc.eval = [horiz](const Eigen::VectorXd& x, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
        const double H = x(0);
        const double r2 = horiz + H * H;
        const double r = std::sqrt(r2);
        if (g) *g << -horiz / (r2 * r), 1.0;
        if (h) {
          h->setZero();
          (*h)(0, 0) = 3.0 * horiz * H / (r2 * r2 * r);
        }
        return x(1) - H / r;
      };
      p.constraints.push_back(std::move(vc));
      v0 = std::clamp(0.999 * h0 / std::sqrt(horiz + h0 * h0), 2.0 * opt.v_floor, 0.999);
      x0(L.v(a)) = v0;
    }

    const double a_coef = d.coef.exp_coef / d.e.r_hat;
    const double b_coef = d.coef.dist_coef / d.e.r_hat;
    std::vector<int> support{0};
    if (L.angle) support.push_back(L.v(a));
    support.push_back(L.zeta(a));
    p.constraints.push_back(
        rate_bound_constraint(support, L.angle, a_coef, b_coef, d.exp_hat, 1, ch, altitude));
    p.lower(L.zeta(a)) = opt.z_min / d.e.r_hat;

    const double lb = d.e.r_hat - d.coef.exp_coef * (angle_term(v0, ch) - d.exp_hat) * L.angle -
                      d.coef.dist_coef * (h0 * h0 - h_hat_sq);
    const double zeta0 = std::max(0.999 * lb / d.e.r_hat, 2.0 * opt.z_min / d.e.r_hat);
    x0(L.zeta(a)) = zeta0;
    mu0 += d.ue->data_bits / (zeta0 * d.e.r_hat);
  }
  x0(L.mu()) = mu0 + 1e-3 * std::max(1.0, mu0);

  const convex::SolveStatus status = convex::solve_convex(p, x0, opt.barrier);
  finalize(out, status, L, links, UavPosition{exp.q, status.x(0)}, s, served, opt);
  return out;
}

}  // namespace uavmec
