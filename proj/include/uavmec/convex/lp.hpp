#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "uavmec/convex/status.hpp"

namespace uavmec::convex {

/// min c'x  s.t.  A x <= b,  E x = d,  lower <= x <= upper.
/// Bounds may be +-infinity. Empty A or E (zero rows) are allowed.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd ineq;
  Eigen::VectorXd ineq_rhs;
  Eigen::MatrixXd eq;
  Eigen::VectorXd eq_rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// n variables, no constraints, bounds [0, +inf).
  static LinearProgram with_dimension(int n);
  int dimension() const { return static_cast<int>(objective.size()); }
};

class LpShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LpOptions {
  /// Certificate tolerance: duality gap, dual infeasibility and primal
  /// residual must each be <= tol * (1 + |c'x|) for an Optimal result.
  double tol = 1e-8;
  /// Reduced-cost and pivot-element threshold.
  double pivot_tol = 1e-10;
  int max_pivots = 50000;
  /// Consecutive degenerate pivots after which entering-variable selection
  /// switches from most-negative reduced cost to Bland's rule.
  int degenerate_streak_for_bland = 50;
};

/// Dense two-phase tableau simplex. On Optimal the result carries a dual
/// point (from the final basis) whose objective is within tol of c'x.
/// Phase 1 declares Infeasible when the artificial sum stays above tol.
SolveStatus solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace uavmec::convex
