#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavmec/optimizer.hpp"
#include "uavmec/scenario.hpp"

namespace uavmec {

inline constexpr int kSweepSchemaVersion = 1;

enum class SweepVariable { NumUes, NumUavs };

std::string_view to_string(SweepVariable v);

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One sweep: for every value of the swept variable and every seed, a
/// scenario is generated and each method is solved on it.
struct ExperimentSpec {
  SweepVariable variable = SweepVariable::NumUes;
  std::vector<int> values;
  int num_ues = 30;   // used when sweeping num_uavs
  int num_uavs = 5;   // used when sweeping num_ues
  std::vector<Method> methods;
  std::uint64_t first_seed = 1;
  int seeds_per_point = 10;
  // Fleet box, CPU speed and channel come from here when set; the UEs are
  // always regenerated per (value, seed).
  std::optional<Scenario> base;
  TaskSpec tasks;
  OptimizerConfig config;
  bool record_wall_time = true;
};

/// Throws SpecError naming the offending key.
void validate(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j,
                              const std::filesystem::path& relative_to = {});
ExperimentSpec load_spec(const std::filesystem::path& path);
nlohmann::ordered_json spec_to_json(const ExperimentSpec& spec);

/// The scenario a sweep solves at (value, seed).
Scenario sweep_scenario(const ExperimentSpec& spec, int value, std::uint64_t seed);

struct SweepRow {
  int value = 0;
  Method method = Method::Proposed;
  std::uint64_t seed = 0;
  std::string status;  // converged | iter_limit | error: <message>
  SolveReport report;
};

/// Rows ordered by (value, seed, method) whatever `jobs` is.
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, int jobs = 1);

struct SummaryRow {
  int value = 0;
  Method method = Method::Proposed;
  int count = 0;      // rows without error
  double mean_mu = 0.0;
  double std_mu = 0.0;  // sample standard deviation, 0 for one row
};

/// Per (value, method) statistics over seeds, errors excluded.
std::vector<SummaryRow> summarize(const ExperimentSpec& spec, const std::vector<SweepRow>& rows);

std::string results_csv(const ExperimentSpec& spec, const std::vector<SweepRow>& rows);
std::string summary_csv(const ExperimentSpec& spec, const std::vector<SummaryRow>& rows);
/// Line chart of mean mu against the swept value, one series per method.
std::string summary_svg(const ExperimentSpec& spec, const std::vector<SummaryRow>& rows);

/// Writes results.csv, summary.csv and mean_mu.svg into `dir`.
void write_sweep_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                         const std::vector<SweepRow>& rows);

}  // namespace uavmec
