#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "test_support.hpp"
#include "uavmec/scenario.hpp"

using namespace uavmec;
using namespace uavmec::testing;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("uavmec_" + name);
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("generation is deterministic and seed-sensitive") {
  const Scenario a = reference_scenario(11, 30, 3);
  const Scenario b = reference_scenario(11, 30, 3);
  CHECK(a == b);
  CHECK(scenario_hash(a) == scenario_hash(b));

  const Scenario s1 = reference_scenario(1, 30, 3);
  const Scenario s2 = reference_scenario(2, 30, 3);
  std::set<std::pair<double, double>> p1, p2;
  for (const Ue& u : s1.ues) p1.emplace(u.position.x, u.position.y);
  for (const Ue& u : s2.ues) p2.emplace(u.position.x, u.position.y);
  CHECK(p1 != p2);
}

TEST_CASE("generation rejects bad arguments") {
  CHECK_THROWS_AS(reference_scenario(1, 0, 3), ScenarioError);
  TaskSpec bad;
  bad.data_bits_min = 2e6;
  bad.data_bits_max = 1e6;
  CHECK_THROWS_AS(generate(1, 5, reference_fleet(2), reference_channel(), bad), ScenarioError);
}

TEST_CASE("generated tasks follow the task spec") {
  TaskSpec spec;
  spec.data_bits_min = 5e5;
  spec.data_bits_max = 2e6;
  const Scenario s = generate(3, 200, reference_fleet(4), reference_channel(), spec);
  for (const Ue& u : s.ues) {
    CHECK(u.data_bits >= 5e5);
    CHECK(u.data_bits <= 2e6);
    CHECK(u.cycles == doctest::Approx(300.0 * u.data_bits));
    CHECK(u.tx_power_w == doctest::Approx(0.1));
  }
  const Scenario fixed = reference_scenario(3, 10, 2);
  for (const Ue& u : fixed.ues) CHECK(u.data_bits == 1e6);
}

TEST_CASE("generated positions stay inside a shifted box") {
  FleetConfig fleet = reference_fleet(2);
  fleet.box = Box{-250.0, -150.0, 10.0, 60.0, 40.0, 80.0};
  const Scenario s = generate(5, 100000, fleet, reference_channel());
  for (const Ue& u : s.ues) REQUIRE(fleet.box.contains(u.position));
}

TEST_CASE("save/load round trip over many seeds") {
  const auto path = temp_file("roundtrip.json");
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TaskSpec spec;
    spec.data_bits_max = 3e6;
    const Scenario s = generate(seed, 1 + static_cast<int>(seed % 17), reference_fleet(3),
                                reference_channel(), spec);
    save(s, path);
    REQUIRE(load(path) == s);
  }
  std::filesystem::remove(path);
}

TEST_CASE("load reports invariant violations by field name") {
  const std::string text = to_json_text(reference_scenario(4, 3, 2));

  CHECK_THROWS_WITH_AS(from_json_text(replace_once(text, "\"h_min_m\": 40.0", "\"h_min_m\": 0.0")),
                       doctest::Contains("h_min_m"), ScenarioError);
  CHECK_THROWS_WITH_AS(from_json_text(replace_once(text, "\"k1\": 0.01", "\"k1\": -0.08")),
                       doctest::Contains("k1"), ScenarioError);
  const std::string k_sum = replace_once(text, "\"k2\": 0.99", "\"k2\": 0.89");
  CHECK_THROWS_WITH_AS(from_json_text(k_sum), doctest::Contains("k1 + k2 = 1"), ScenarioError);
  CHECK_THROWS_WITH_AS(from_json_text(replace_once(text, "\"cpu_hz\"", "\"cpu_speed\"")),
                       doctest::Contains("fleet.cpu_hz"), ScenarioError);
  CHECK_THROWS_WITH_AS(from_json_text(replace_once(text, "\"schema_version\": 1",
                                                   "\"schema_version\": 7")),
                       doctest::Contains("schema_version"), ScenarioError);
}

TEST_CASE("parse errors carry a location") {
  CHECK_THROWS_WITH_AS(from_json_text("{\n  \"schema_version\": 1,\n  oops\n}"),
                       doctest::Contains("line 3"), ScenarioError);
  CHECK_THROWS_AS(load(temp_file("does_not_exist.json")), ScenarioError);
}
