#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavmec/channel.hpp"

namespace uavmec {

struct Ue {
  Point2 position;
  double data_bits = 1e6;
  double cycles = 3e8;
  double tx_power_w = 0.1;

  friend bool operator==(const Ue&, const Ue&) = default;
};

struct Box {
  double x_min = 0.0;
  double x_max = 100.0;
  double y_min = 0.0;
  double y_max = 100.0;
  double h_min = 40.0;
  double h_max = 80.0;

  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  double clamp_x(double x) const { return std::min(std::max(x, x_min), x_max); }
  double clamp_y(double y) const { return std::min(std::max(y, y_min), y_max); }
  double clamp_h(double h) const { return std::min(std::max(h, h_min), h_max); }

  friend bool operator==(const Box&, const Box&) = default;
};

struct FleetConfig {
  int num_uavs = 5;
  double cpu_hz = 2e9;
  Box box;

  friend bool operator==(const FleetConfig&, const FleetConfig&) = default;
};

struct Scenario {
  std::vector<Ue> ues;
  FleetConfig fleet;
  ChannelParams channel;
  std::uint64_t seed = 0;

  int num_ues() const { return static_cast<int>(ues.size()); }
  int num_uavs() const { return fleet.num_uavs; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Task draw for generated scenarios. D_i ~ U[data_bits_min, data_bits_max]
/// (fixed when equal), F_i = cycles_per_bit * D_i.
struct TaskSpec {
  double data_bits_min = 1e6;
  double data_bits_max = 1e6;
  double cycles_per_bit = 300.0;
  double tx_power_w = 0.1;  // 20 dBm
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kScenarioSchemaVersion = 1;

/// Throws ScenarioError naming the offending field.
void validate(const Scenario& scenario);

/// UE positions are i.i.d. uniform over the horizontal box. Draws come from
/// std::mt19937_64 mapped to doubles through uniform01(), so a seed
/// reproduces the same scenario on every platform.
Scenario generate(std::uint64_t seed, int n_ues, const FleetConfig& fleet,
                  const ChannelParams& channel, const TaskSpec& tasks = {});

/// Top 53 bits of one engine draw, scaled into [0, 1).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

std::string to_json_text(const Scenario& scenario);
Scenario from_json_text(const std::string& text);

void save(const Scenario& scenario, const std::filesystem::path& path);
Scenario load(const std::filesystem::path& path);

/// FNV-1a 64 over the canonical JSON serialization, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);

}  // namespace uavmec
