#pragma once

#include <functional>
#include <string>
#include <vector>

namespace uavmec {

enum class VerifyLevel { Fast, Full };

enum class Fault { None, PsiSign };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Fast;
  Fault fault = Fault::None;  // test fixture: corrupts one check on purpose
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the oracle suites in a fixed order: bound-domination,
/// coefficient-finite-difference, elevation-convexity, association-relaxation,
/// small-instance-grid. `on_result` sees each check as it finishes.
std::vector<CheckResult> run_verification(
    const VerifyOptions& options, const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace uavmec
