#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace uavmec::convex {

enum class SolveCode { Optimal, Infeasible, Unbounded, IterLimit, NumericalFailure };

std::string_view to_string(SolveCode code);

struct SolveStatus {
  SolveCode code = SolveCode::NumericalFailure;
  double objective = 0.0;
  Eigen::VectorXd x;
  /// LP: max of duality gap, dual infeasibility and primal infeasibility.
  /// Barrier: max of the m/t gap bound, the last Newton decrement^2/2 and
  /// the worst constraint violation.
  double kkt_residual = 0.0;
  int iterations = 0;
  /// LP only: objective of the certifying dual point.
  double dual_objective = 0.0;
  /// Barrier only: c'x at the end of each centering stage.
  std::vector<double> stage_objectives;

  bool optimal() const { return code == SolveCode::Optimal; }
};

}  // namespace uavmec::convex
