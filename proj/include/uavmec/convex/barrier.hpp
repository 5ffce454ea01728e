#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "uavmec/convex/status.hpp"

namespace uavmec::convex {

/// g(x) <= 0 with g convex and twice differentiable. The callback receives
/// only the variables listed in `support` (in that order) and must fill the
/// gradient/Hessian over that local ordering when the pointers are non-null.
struct SmoothConstraint {
  std::vector<int> support;
  std::function<double(const Eigen::VectorXd& local, Eigen::VectorXd* grad,
                       Eigen::MatrixXd* hess)>
      eval;
};

/// min c'x  s.t.  g_k(x) <= 0,  lower <= x <= upper (bounds may be infinite).
struct ConvexProgram {
  Eigen::VectorXd objective;
  std::vector<SmoothConstraint> constraints;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  explicit ConvexProgram(int n = 0);
  int dimension() const { return static_cast<int>(objective.size()); }
  double constraint_value(int k, const Eigen::VectorXd& x) const;
  /// Largest g_k(x) and bound violation (negative when strictly feasible).
  double max_violation(const Eigen::VectorXd& x) const;
};

struct BarrierOptions {
  double tol = 1e-8;           // stop once m/t <= tol
  int max_newton = 3000;       // total Newton steps, including phase 1
  double t0 = 1.0;
  double t_factor = 10.0;
  double newton_tol = 1e-10;   // per-stage stop on decrement^2 / 2
  double ls_alpha = 0.25;
  double ls_beta = 0.5;
};

/// Log-barrier path following with damped Newton steps. If x0 is not
/// strictly feasible a slack-minimization phase 1 looks for an interior
/// point first and reports Infeasible when the minimal slack is positive.
SolveStatus solve_convex(const ConvexProgram& program, const Eigen::VectorXd& x0,
                         const BarrierOptions& options = {});

}  // namespace uavmec::convex
