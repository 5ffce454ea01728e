#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "uavmec/optimizer.hpp"
#include "uavmec/scenario.hpp"

namespace uavmec {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::ordered_json config_to_json(const OptimizerConfig& config);

/// Applies the keys present in `j` on top of `base`; unknown keys throw
/// std::invalid_argument naming the key.
OptimizerConfig config_from_json(const nlohmann::json& j, OptimizerConfig base = {});

/// Everything needed to reproduce the run: provenance, config, outcome,
/// deployment and association.
nlohmann::ordered_json report_to_json(const Scenario& scenario, const OptimizerConfig& config,
                                      const SolveReport& report);

/// Lines of `# key: value` provenance shared by every CSV the tools write.
std::string provenance_header(std::string_view schema, const Scenario* scenario,
                              const nlohmann::ordered_json& config);

/// Columns uav_id, x_m, y_m, h_m.
void write_deployment_csv(const std::filesystem::path& path, const Scenario& scenario,
                          const OptimizerConfig& config, const SolveReport& report);

/// Columns ue_id, uav_id.
void write_association_csv(const std::filesystem::path& path, const Scenario& scenario,
                           const OptimizerConfig& config, const SolveReport& report);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace uavmec
