#include "uavmec/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace uavmec {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& field, const char* what) {
  if (!ok) throw ScenarioError(field + ": " + what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0; }

json box_json(const Box& b) {
  return json{{"x_min_m", b.x_min}, {"x_max_m", b.x_max}, {"y_min_m", b.y_min},
              {"y_max_m", b.y_max}, {"h_min_m", b.h_min}, {"h_max_m", b.h_max}};
}

json channel_json(const ChannelParams& c) {
  return json{{"bandwidth_hz", c.bandwidth_hz},
              {"ref_gain_linear", c.ref_gain},
              {"pathloss_exp", c.pathloss_exp},
              {"noise_w", c.noise_w},
              {"snr_gap_linear", c.snr_gap},
              {"k1", c.k1},
              {"k2", c.k2},
              {"k3", c.k3},
              {"k4", c.k4},
              {"rician_a1", c.rician_a1},
              {"rician_a2", c.rician_a2}};
}

// Fetches a required key, reporting the dotted path on failure.
template <class T>
T field(const json& obj, const std::string& path, const char* key) {
  const std::string where = path.empty() ? key : path + "." + key;
  if (!obj.is_object()) throw ScenarioError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(where + ": missing field");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(where + ": " + e.what());
  }
}

template <class T>
T field_or(const json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return field<T>(obj, path, key);
}

}  // namespace

void validate(const Scenario& s) {
  require(!s.ues.empty(), "ues", "at least one UE is required");
  const FleetConfig& f = s.fleet;
  require(f.num_uavs >= 1, "fleet.num_uavs", "must be >= 1");
  require(finite_positive(f.cpu_hz), "fleet.cpu_hz", "must be > 0");
  const Box& b = f.box;
  require(std::isfinite(b.x_min) && std::isfinite(b.x_max) && b.x_min < b.x_max,
          "fleet.box.x_max_m", "must be > x_min_m");
  require(std::isfinite(b.y_min) && std::isfinite(b.y_max) && b.y_min < b.y_max,
          "fleet.box.y_max_m", "must be > y_min_m");
  require(finite_positive(b.h_min), "fleet.box.h_min_m", "must be > 0 (H^min)");
  require(std::isfinite(b.h_max) && b.h_min <= b.h_max, "fleet.box.h_max_m",
          "must be >= h_min_m");
  try {
    validate(s.channel);
  } catch (const ChannelError& e) {
    throw ScenarioError(e.what());
  }
  for (std::size_t i = 0; i < s.ues.size(); ++i) {
    const Ue& u = s.ues[i];
    const std::string where = "ues[" + std::to_string(i) + "]";
    require(finite_positive(u.data_bits), where + ".data_bits", "must be > 0");
    require(finite_positive(u.cycles), where + ".cycles", "must be > 0");
    require(finite_positive(u.tx_power_w), where + ".tx_power_w", "must be > 0");
    require(b.contains(u.position), where + ".x_m/y_m", "position outside the area box");
  }
}

Scenario generate(std::uint64_t seed, int n_ues, const FleetConfig& fleet,
                  const ChannelParams& channel, const TaskSpec& tasks) {
  if (n_ues < 1) throw ScenarioError("n_ues: must be >= 1");
  if (!(finite_positive(tasks.data_bits_min) && tasks.data_bits_min <= tasks.data_bits_max &&
        std::isfinite(tasks.data_bits_max)))
    throw ScenarioError("task_spec.data_bits: need 0 < min <= max");
  if (!finite_positive(tasks.cycles_per_bit))
    throw ScenarioError("task_spec.cycles_per_bit: must be > 0");
  if (!finite_positive(tasks.tx_power_w)) throw ScenarioError("task_spec.tx_power_w: must be > 0");

  Scenario s;
  s.fleet = fleet;
  s.channel = channel;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  const Box& b = fleet.box;
  s.ues.reserve(static_cast<std::size_t>(n_ues));
  for (int i = 0; i < n_ues; ++i) {
    Ue u;
    u.position.x = uniform(rng, b.x_min, b.x_max);
    u.position.y = uniform(rng, b.y_min, b.y_max);
    u.data_bits = tasks.data_bits_min == tasks.data_bits_max
                      ? tasks.data_bits_min
                      : uniform(rng, tasks.data_bits_min, tasks.data_bits_max);
    u.cycles = tasks.cycles_per_bit * u.data_bits;
    u.tx_power_w = tasks.tx_power_w;
    s.ues.push_back(u);
  }
  validate(s);
  return s;
}

std::string to_json_text(const Scenario& s) {
  json ues = json::array();
  for (const Ue& u : s.ues) {
    ues.push_back(json{{"x_m", u.position.x},
                       {"y_m", u.position.y},
                       {"data_bits", u.data_bits},
                       {"cycles", u.cycles},
                       {"tx_power_w", u.tx_power_w}});
  }
  json doc{{"schema_version", kScenarioSchemaVersion},
           {"seed", s.seed},
           {"fleet",
            {{"num_uavs", s.fleet.num_uavs},
             {"cpu_hz", s.fleet.cpu_hz},
             {"box", box_json(s.fleet.box)}}},
           {"channel", channel_json(s.channel)},
           {"ues", ues}};
  return doc.dump(2) + "\n";
}

Scenario from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("parse error: ") + e.what());
  }
  const int version = field<int>(doc, "", "schema_version");
  if (version != kScenarioSchemaVersion)
    throw ScenarioError("schema_version: unsupported version " + std::to_string(version));

  Scenario s;
  s.seed = field_or<std::uint64_t>(doc, "", "seed", 0);
  if (!doc.contains("fleet")) throw ScenarioError("fleet: missing field");
  const json& fleet = doc["fleet"];
  s.fleet.num_uavs = field<int>(fleet, "fleet", "num_uavs");
  s.fleet.cpu_hz = field<double>(fleet, "fleet", "cpu_hz");
  if (!fleet.contains("box")) throw ScenarioError("fleet.box: missing field");
  const json& box = fleet["box"];
  s.fleet.box.x_min = field<double>(box, "fleet.box", "x_min_m");
  s.fleet.box.x_max = field<double>(box, "fleet.box", "x_max_m");
  s.fleet.box.y_min = field<double>(box, "fleet.box", "y_min_m");
  s.fleet.box.y_max = field<double>(box, "fleet.box", "y_max_m");
  s.fleet.box.h_min = field<double>(box, "fleet.box", "h_min_m");
  s.fleet.box.h_max = field<double>(box, "fleet.box", "h_max_m");

  if (!doc.contains("channel")) throw ScenarioError("channel: missing field");
  const json& ch = doc["channel"];
  ChannelParams& c = s.channel;
  c.bandwidth_hz = field<double>(ch, "channel", "bandwidth_hz");
  c.ref_gain = field<double>(ch, "channel", "ref_gain_linear");
  c.pathloss_exp = field<double>(ch, "channel", "pathloss_exp");
  c.noise_w = field<double>(ch, "channel", "noise_w");
  c.snr_gap = field<double>(ch, "channel", "snr_gap_linear");
  c.k1 = field<double>(ch, "channel", "k1");
  c.k2 = field<double>(ch, "channel", "k2");
  c.k3 = field<double>(ch, "channel", "k3");
  c.k4 = field<double>(ch, "channel", "k4");
  c.rician_a1 = field_or<double>(ch, "channel", "rician_a1", 1.0);
  c.rician_a2 = field_or<double>(ch, "channel", "rician_a2", 1.0);

  if (!doc.contains("ues") || !doc["ues"].is_array()) throw ScenarioError("ues: missing array");
  const json& ues = doc["ues"];
  for (std::size_t i = 0; i < ues.size(); ++i) {
    const std::string where = "ues[" + std::to_string(i) + "]";
    Ue u;
    u.position.x = field<double>(ues[i], where, "x_m");
    u.position.y = field<double>(ues[i], where, "y_m");
    u.data_bits = field<double>(ues[i], where, "data_bits");
    u.cycles = field<double>(ues[i], where, "cycles");
    u.tx_power_w = field<double>(ues[i], where, "tx_power_w");
    s.ues.push_back(u);
  }
  validate(s);
  return s;
}

void save(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot open " + path.string() + " for writing");
  out << to_json_text(s);
  if (!out) throw ScenarioError("write failed: " + path.string());
}

Scenario load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json_text(s)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace uavmec
