#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "uavmec/cli.hpp"
#include "uavmec/experiment.hpp"
#include "uavmec/report.hpp"

using namespace uavmec;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "uavmec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uavmec_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("gen then solve a one-UE scenario") {
  const fs::path dir = scratch("one");
  const auto g = cli({"gen", "--ues", "1", "--uavs", "1", "--seed", "3", "--out",
                      (dir / "s.json").string()});
  REQUIRE(g.code == 0);
  const auto r = cli({"solve", "--scenario", (dir / "s.json").string(), "--out",
                      (dir / "out").string()});
  CHECK(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "out" / "report_proposed.json"));
  CHECK(r.out.find("mu_s=" + format_double(report.at("mu_s").get<double>())) !=
        std::string::npos);
  CHECK(report.at("converged").get<bool>());
  CHECK(report.at("scenario_seed").get<int>() == 3);

  const std::string dep = slurp(dir / "out" / "deployment_proposed.csv");
  CHECK(dep.find("# git_describe: ") != std::string::npos);
  CHECK(dep.find("# scenario_seed: 3") != std::string::npos);
  CHECK(dep.find("# config: ") != std::string::npos);
  CHECK(dep.find("uav_id,x_m,y_m,h_m\n") != std::string::npos);
  CHECK(slurp(dir / "out" / "association_proposed.csv").find("ue_id,uav_id\n0,0\n") !=
        std::string::npos);
}

TEST_CASE("solve --method all writes four reports with the same scenario hash") {
  const fs::path dir = scratch("all");
  REQUIRE(cli({"gen", "--ues", "12", "--uavs", "3", "--seed", "9", "--out",
               (dir / "s.json").string()}).code == 0);
  const auto r = cli({"solve", "--scenario", (dir / "s.json").string(), "--method", "all",
                      "--out", (dir / "out").string()});
  CHECK(r.code == 0);
  std::string hash;
  for (const char* m : {"proposed", "hpo", "vpo", "clbo"}) {
    const auto j = nlohmann::json::parse(slurp(dir / "out" / (std::string("report_") + m + ".json")));
    CHECK(j.at("method").get<std::string>() == m);
    if (hash.empty()) hash = j.at("scenario_hash").get<std::string>();
    CHECK(j.at("scenario_hash").get<std::string>() == hash);
  }
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(cli({"solve", "--scenario", (dir / "missing.json").string(), "--out",
             (dir / "o").string()}).code == 1);
  CHECK(cli({"solve"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
  REQUIRE(cli({"gen", "--ues", "30", "--uavs", "3", "--seed", "2", "--out",
               (dir / "s.json").string()}).code == 0);
  const auto capped = cli({"solve", "--scenario", (dir / "s.json").string(), "--max-iters", "1",
                           "--out", (dir / "o").string()});
  CHECK(capped.code == 2);
  CHECK(capped.out.find("converged=false") != std::string::npos);
  CHECK(cli({"solve", "--scenario", (dir / "s.json").string(), "--tol", "0", "--out",
             (dir / "o").string()}).code == 1);
}

TEST_CASE("verify fast passes quickly; an injected sign fault is named") {
  const auto start = std::chrono::steady_clock::now();
  const auto ok = cli({"verify", "--level", "fast"});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(ok.code == 0);
  CHECK(secs < 60.0);
  CHECK(ok.out.find("FAIL") == std::string::npos);

  const auto bad = cli({"verify", "--inject-fault", "psi-sign"});
  CHECK(bad.code != 0);
  CHECK(bad.out.find("FAIL bound-domination") != std::string::npos);
}

TEST_CASE("sweep spec parsing and validation") {
  const nlohmann::json good = nlohmann::json::parse(R"({
    "schema_version": 1,
    "sweep": {"variable": "num_uavs", "values": [2, 3]},
    "num_ues": 6,
    "methods": ["proposed", "hpo"],
    "seeds": {"first": 4, "count": 2},
    "config": {"restarts": 1},
    "record_wall_time": false
  })");
  const ExperimentSpec s = spec_from_json(good);
  CHECK(s.variable == SweepVariable::NumUavs);
  CHECK(s.num_ues == 6);
  CHECK(s.first_seed == 4);
  CHECK(s.config.restarts == 1);
  CHECK(sweep_scenario(s, 3, 4).num_uavs() == 3);
  CHECK(sweep_scenario(s, 3, 4).ues == sweep_scenario(s, 2, 4).ues);

  auto broken = [&](const char* key, nlohmann::json value) {
    nlohmann::json j = good;
    if (value.is_null())
      j.erase(key);
    else
      j[key] = value;
    return j;
  };
  auto message = [](const nlohmann::json& j) {
    try {
      spec_from_json(j);
    } catch (const SpecError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(broken("methods", nlohmann::json::array())).find("spec.methods") == 0);
  CHECK(message(broken("methods", {"bogus"})).find("spec.methods") == 0);
  CHECK(message(broken("sweep", {{"variable", "num_uavs"}, {"values", {3, 3}}}))
            .find("spec.sweep.values") == 0);
  CHECK(message(broken("sweep", {{"variable", "height"}, {"values", {3}}}))
            .find("spec.sweep.variable") == 0);
  CHECK(message(broken("num_ues", nullptr)).find("spec.num_ues") == 0);
  CHECK(message(broken("extra", 1)).find("spec.extra") == 0);
  CHECK(message(broken("schema_version", 2)).find("spec.schema_version") == 0);
  CHECK(message(broken("config", {{"restarts", 0}})).find("spec.config") == 0);
}

TEST_CASE("sweep outputs are deterministic and well formed") {
  const fs::path dir = scratch("sweep");
  {
    std::ofstream spec(dir / "spec.json");
    spec << R"({"schema_version": 1, "sweep": {"variable": "num_ues", "values": [4, 8]},
               "num_uavs": 2, "methods": ["proposed", "vpo"],
               "seeds": {"first": 1, "count": 2}, "config": {"restarts": 2},
               "record_wall_time": false})";
  }
  REQUIRE(cli({"sweep", "--spec", (dir / "spec.json").string(), "--out",
               (dir / "a").string()}).code == 0);
  REQUIRE(cli({"sweep", "--spec", (dir / "spec.json").string(), "--out",
               (dir / "b").string(), "--jobs", "3"}).code == 0);
  for (const char* f : {"results.csv", "summary.csv", "mean_mu.svg"}) {
    CHECK(!slurp(dir / "a" / f).empty());
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const std::string results = slurp(dir / "a" / "results.csv");
  CHECK(results.find("# schema: uavmec-sweep-results/1\n") == 0);
  CHECK(results.find("\nsweep_var,value,method,seed,mu_s,iters,wall_ms,status\n") !=
        std::string::npos);
  CHECK(results.find("num_ues,8,vpo,2,") != std::string::npos);
  CHECK(results.find(",NA,converged\n") != std::string::npos);
  int rows = 0;
  std::istringstream lines(results);
  for (std::string line; std::getline(lines, line);) rows += line.rfind("num_ues,", 0) == 0;
  CHECK(rows == 8);
  const std::string svg = slurp(dir / "a" / "mean_mu.svg");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find(">proposed</text>") != std::string::npos);
  CHECK(svg.find(">vpo</text>") != std::string::npos);
}

TEST_CASE("summary statistics") {
  ExperimentSpec spec;
  spec.values = {5};
  spec.methods = {Method::Hpo};
  std::vector<SweepRow> rows(3);
  const double mus[] = {1.0, 2.0, 4.0};
  for (int k = 0; k < 3; ++k) {
    rows[k].value = 5;
    rows[k].method = Method::Hpo;
    rows[k].status = "converged";
    rows[k].report.mu = mus[k];
  }
  rows.push_back(rows[0]);
  rows.back().status = "error: boom";
  const auto s = summarize(spec, rows);
  REQUIRE(s.size() == 1);
  CHECK(s[0].count == 3);
  CHECK(s[0].mean_mu == doctest::Approx(7.0 / 3.0));
  // Deviations -4/3, -1/3, 5/3: sample variance (16 + 1 + 25) / 9 / 2 = 7/3.
  CHECK(s[0].std_mu == doctest::Approx(std::sqrt(7.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("config round trip") {
  OptimizerConfig c;
  c.restarts = 7;
  c.rel_tol = 2e-5;
  c.placement.z_min = 3.0;
  const OptimizerConfig back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  CHECK(back.restarts == 7);
  CHECK(back.rel_tol == 2e-5);
  CHECK(back.placement.z_min == 3.0);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"restart", 2}}), std::invalid_argument);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
