#include "uavmec/convex/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavmec::convex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& support) {
  Eigen::VectorXd local(static_cast<Eigen::Index>(support.size()));
  for (std::size_t a = 0; a < support.size(); ++a) local(a) = x(support[a]);
  return local;
}

int count_inequalities(const ConvexProgram& p) {
  int m = static_cast<int>(p.constraints.size());
  for (int i = 0; i < p.dimension(); ++i)
    m += std::isfinite(p.lower(i)) + std::isfinite(p.upper(i));
  return m;
}

// t c'x - sum log(-g) - sum log(box slack); +inf outside the strict interior.
double barrier_value(const ConvexProgram& p, const Eigen::VectorXd& x, double t) {
  double v = t * p.objective.dot(x);
  for (int i = 0; i < p.dimension(); ++i) {
    if (std::isfinite(p.lower(i))) {
      const double s = x(i) - p.lower(i);
      if (!(s > 0)) return kInf;
      v -= std::log(s);
    }
    if (std::isfinite(p.upper(i))) {
      const double s = p.upper(i) - x(i);
      if (!(s > 0)) return kInf;
      v -= std::log(s);
    }
  }
  for (const SmoothConstraint& c : p.constraints) {
    const double g = c.eval(gather(x, c.support), nullptr, nullptr);
    if (!(g < 0)) return kInf;
    v -= std::log(-g);
  }
  return std::isfinite(v) ? v : kInf;
}

void barrier_derivatives(const ConvexProgram& p, const Eigen::VectorXd& x, double t,
                         Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  const int n = p.dimension();
  grad = t * p.objective;
  hess.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(p.lower(i))) {
      const double s = x(i) - p.lower(i);
      grad(i) -= 1.0 / s;
      hess(i, i) += 1.0 / (s * s);
    }
    if (std::isfinite(p.upper(i))) {
      const double s = p.upper(i) - x(i);
      grad(i) += 1.0 / s;
      hess(i, i) += 1.0 / (s * s);
    }
  }
  Eigen::VectorXd gl;
  Eigen::MatrixXd hl;
  for (const SmoothConstraint& c : p.constraints) {
    const auto k = static_cast<Eigen::Index>(c.support.size());
    gl.setZero(k);
    hl.setZero(k, k);
    const double g = c.eval(gather(x, c.support), &gl, &hl);
    const double w = -1.0 / g;
    for (Eigen::Index a = 0; a < k; ++a) {
      const int ia = c.support[a];
      grad(ia) += w * gl(a);
      for (Eigen::Index b = 0; b < k; ++b)
        hess(ia, c.support[b]) += w * w * gl(a) * gl(b) + w * hl(a, b);
    }
  }
}

struct PathResult {
  SolveCode code = SolveCode::NumericalFailure;
  Eigen::VectorXd x;
  double gap_bound = kInf;
  double last_decrement = 0.0;
  std::vector<double> stage_objectives;
  bool stopped_early = false;
};

template <class EarlyStop>
PathResult follow_path(const ConvexProgram& p, Eigen::VectorXd x, const BarrierOptions& opt,
                       int& newton_steps, EarlyStop&& early_stop) {
  PathResult r;
  const int n = p.dimension();
  const int m = count_inequalities(p);
  if (m == 0) {
    r.x = x;
    r.gap_bound = 0.0;
    r.code = p.objective.isZero() ? SolveCode::Optimal : SolveCode::Unbounded;
    return r;
  }

  Eigen::VectorXd grad(n), dx(n);
  Eigen::MatrixXd hess(n, n);
  double t = opt.t0;
  while (true) {
    // Centering.
    while (true) {
      if (newton_steps >= opt.max_newton) {
        r.x = x;
        r.gap_bound = m / t;
        r.code = SolveCode::IterLimit;
        return r;
      }
      barrier_derivatives(p, x, t, grad, hess);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      dx = -ldlt.solve(grad);
      double reg = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      while ((ldlt.info() != Eigen::Success || !dx.allFinite() || grad.dot(dx) > 0) &&
             reg < 1e12) {
        Eigen::MatrixXd shifted = hess;
        shifted.diagonal().array() += reg;
        ldlt.compute(shifted);
        dx = -ldlt.solve(grad);
        reg *= 100.0;
      }
      if (!dx.allFinite()) {
        r.x = x;
        r.code = SolveCode::NumericalFailure;
        return r;
      }
      const double dec2 = -grad.dot(dx);
      r.last_decrement = 0.5 * dec2 / t;  // in objective units
      if (0.5 * dec2 <= opt.newton_tol) break;

      ++newton_steps;
      const double f0 = barrier_value(p, x, t);
      const double slope = grad.dot(dx);
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(f0);
      double step = 1.0;
      bool moved = false;
      while (step > 1e-20) {
        const Eigen::VectorXd trial = x + step * dx;
        const double f1 = barrier_value(p, trial, t);
        if (f1 <= f0 + opt.ls_alpha * step * slope + noise) {
          moved = trial != x;
          x = trial;
          break;
        }
        step *= opt.ls_beta;
      }
      if (!moved) break;  // no representable progress left at this t
      if (std::abs(p.objective.dot(x)) > 1e100) {
        r.x = x;
        r.code = SolveCode::Unbounded;
        return r;
      }
      if (early_stop(x)) {
        r.x = x;
        r.stopped_early = true;
        r.gap_bound = m / t;
        r.code = SolveCode::Optimal;
        return r;
      }
    }
    r.stage_objectives.push_back(p.objective.dot(x));
    if (m / t <= opt.tol) break;
    t *= opt.t_factor;
  }
  r.x = x;
  r.gap_bound = m / t;
  r.code = SolveCode::Optimal;
  return r;
}

// Moves x strictly inside the box.
Eigen::VectorXd interior_of_box(const ConvexProgram& p, Eigen::VectorXd x) {
  for (int i = 0; i < p.dimension(); ++i) {
    const double lo = p.lower(i), hi = p.upper(i);
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double margin = 1e-3 * (hi - lo);
      if (!(x(i) > lo && x(i) < hi)) x(i) = std::clamp(x(i), lo + margin, hi - margin);
      if (hi - lo <= 0) x(i) = 0.5 * (lo + hi);
    } else if (std::isfinite(lo) && !(x(i) > lo)) {
      x(i) = lo + 1e-3 * std::max(1.0, std::abs(lo));
    } else if (std::isfinite(hi) && !(x(i) < hi)) {
      x(i) = hi - 1e-3 * std::max(1.0, std::abs(hi));
    }
  }
  return x;
}

}  // namespace

ConvexProgram::ConvexProgram(int n)
    : objective(Eigen::VectorXd::Zero(n)),
      lower(Eigen::VectorXd::Constant(n, -kInf)),
      upper(Eigen::VectorXd::Constant(n, kInf)) {}

double ConvexProgram::constraint_value(int k, const Eigen::VectorXd& x) const {
  const SmoothConstraint& c = constraints.at(static_cast<std::size_t>(k));
  return c.eval(gather(x, c.support), nullptr, nullptr);
}

double ConvexProgram::max_violation(const Eigen::VectorXd& x) const {
  double worst = -kInf;
  for (int i = 0; i < dimension(); ++i) {
    if (std::isfinite(lower(i))) worst = std::max(worst, lower(i) - x(i));
    if (std::isfinite(upper(i))) worst = std::max(worst, x(i) - upper(i));
  }
  for (std::size_t k = 0; k < constraints.size(); ++k)
    worst = std::max(worst, constraint_value(static_cast<int>(k), x));
  return worst;
}

SolveStatus solve_convex(const ConvexProgram& p, const Eigen::VectorXd& x0,
                         const BarrierOptions& opt) {
  SolveStatus status;
  const int n = p.dimension();
  if (x0.size() != n || p.lower.size() != n || p.upper.size() != n)
    throw std::invalid_argument("solve_convex: dimension mismatch");
  for (int i = 0; i < n; ++i) {
    if (p.lower(i) > p.upper(i)) {
      status.code = SolveCode::Infeasible;
      status.x = x0;
      return status;
    }
  }

  int newton_steps = 0;
  Eigen::VectorXd x = interior_of_box(p, x0);
  double violation = -kInf;
  for (std::size_t k = 0; k < p.constraints.size(); ++k)
    violation = std::max(violation, p.constraint_value(static_cast<int>(k), x));

  if (!(violation < 0)) {
    // Phase 1: min s  s.t.  g_k(x) <= s, box on x.
    ConvexProgram slack(n + 1);
    slack.objective(n) = 1.0;
    slack.lower.head(n) = p.lower;
    slack.upper.head(n) = p.upper;
    for (const SmoothConstraint& c : p.constraints) {
      SmoothConstraint lifted;
      lifted.support = c.support;
      lifted.support.push_back(n);
      lifted.eval = [&c](const Eigen::VectorXd& local, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
        const auto k = local.size() - 1;
        Eigen::VectorXd gl, inner = local.head(k);
        Eigen::MatrixXd hl;
        if (g) gl.setZero(k);
        if (h) hl.setZero(k, k);
        const double v = c.eval(inner, g ? &gl : nullptr, h ? &hl : nullptr);
        if (g) {
          g->head(k) = gl;
          (*g)(k) = -1.0;
        }
        if (h) h->topLeftCorner(k, k) = hl;
        return v - local(k);
      };
      slack.constraints.push_back(std::move(lifted));
    }
    Eigen::VectorXd xs(n + 1);
    xs.head(n) = x;
    xs(n) = std::isfinite(violation) ? violation + 1.0 : 1.0;
    if (!std::isfinite(violation)) {
      status.code = SolveCode::NumericalFailure;
      status.x = x;
      return status;
    }
    const PathResult ph1 = follow_path(slack, xs, opt, newton_steps, [&](const Eigen::VectorXd& z) {
      Eigen::VectorXd inner = z.head(n);
      for (std::size_t k = 0; k < p.constraints.size(); ++k)
        if (!(p.constraint_value(static_cast<int>(k), inner) < 0)) return false;
      return true;
    });
    status.iterations = newton_steps;
    if (!ph1.stopped_early) {
      status.x = ph1.x.head(n);
      status.code = ph1.code == SolveCode::Optimal ? SolveCode::Infeasible : ph1.code;
      return status;
    }
    x = ph1.x.head(n);
  }

  const PathResult r = follow_path(p, x, opt, newton_steps, [](const Eigen::VectorXd&) { return false; });
  status.code = r.code;
  status.x = r.x;
  status.iterations = newton_steps;
  status.objective = p.objective.dot(r.x);
  status.stage_objectives = r.stage_objectives;
  status.kkt_residual =
      std::max({r.gap_bound, r.last_decrement, std::max(0.0, p.max_violation(r.x))});
  if (status.code == SolveCode::Optimal && status.kkt_residual > opt.tol)
    status.code = SolveCode::NumericalFailure;
  return status;
}

}  // namespace uavmec::convex
