#include "uavmec/convex/status.hpp"

namespace uavmec::convex {

std::string_view to_string(SolveCode code) {
  switch (code) {
    case SolveCode::Optimal: return "optimal";
    case SolveCode::Infeasible: return "infeasible";
    case SolveCode::Unbounded: return "unbounded";
    case SolveCode::IterLimit: return "iter_limit";
    case SolveCode::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace uavmec::convex
