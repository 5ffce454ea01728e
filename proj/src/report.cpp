#include "uavmec/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uavmec/version.hpp"

namespace uavmec {
namespace {

using ojson = nlohmann::ordered_json;

template <class T>
void take(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known,
                    const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument(where + key + ": unknown key");
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

ojson config_to_json(const OptimizerConfig& c) {
  ojson j;
  j["max_outer_iters"] = c.max_outer_iters;
  j["rel_tol"] = c.rel_tol;
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  j["hpo_altitude_m"] = c.hpo_altitude_m;
  j["kmeans_max_iters"] = c.kmeans_max_iters;
  ojson p;
  p["v_floor"] = c.placement.v_floor;
  p["z_min"] = c.placement.z_min;
  p["descent_tol"] = c.placement.descent_tol;
  p["barrier_tol"] = c.placement.barrier.tol;
  p["barrier_max_newton"] = c.placement.barrier.max_newton;
  j["placement"] = p;
  return j;
}

OptimizerConfig config_from_json(const nlohmann::json& j, OptimizerConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  reject_unknown(j, {"max_outer_iters", "rel_tol", "restarts", "seed", "hpo_altitude_m",
                     "kmeans_max_iters", "placement"}, "config.");
  take(j, "max_outer_iters", c.max_outer_iters);
  take(j, "rel_tol", c.rel_tol);
  take(j, "restarts", c.restarts);
  take(j, "seed", c.seed);
  take(j, "hpo_altitude_m", c.hpo_altitude_m);
  take(j, "kmeans_max_iters", c.kmeans_max_iters);
  if (j.contains("placement")) {
    const auto& p = j.at("placement");
    reject_unknown(p, {"v_floor", "z_min", "descent_tol", "barrier_tol", "barrier_max_newton"},
                   "config.placement.");
    take(p, "v_floor", c.placement.v_floor);
    take(p, "z_min", c.placement.z_min);
    take(p, "descent_tol", c.placement.descent_tol);
    take(p, "barrier_tol", c.placement.barrier.tol);
    take(p, "barrier_max_newton", c.placement.barrier.max_newton);
  }
  validate(c);
  return c;
}

ojson report_to_json(const Scenario& s, const OptimizerConfig& cfg, const SolveReport& r) {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  j["git_describe"] = std::string(git_describe());
  j["scenario_seed"] = s.seed;
  j["scenario_hash"] = scenario_hash(s);
  j["num_ues"] = s.num_ues();
  j["num_uavs"] = s.num_uavs();
  j["method"] = std::string(to_string(r.method));
  j["config"] = config_to_json(cfg);
  j["mu_s"] = r.mu;
  j["mu_model_s"] = r.mu_model;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["restart_index"] = r.restart_index;
  j["association_regressions"] = r.association_regressions;
  j["wall_ms"] = r.wall_ms;
  j["mu_trace_s"] = r.mu_trace;
  j["per_uav_time_s"] = r.per_uav_times;
  j["relaxed_elevation"] = r.relaxed_elevation;  // NaN is written as null
  j["relaxed_rate_bps"] = r.relaxed_rate;
  ojson dep = ojson::array();
  for (const auto& u : r.deployment.uavs) dep.push_back({{"x_m", u.q.x}, {"y_m", u.q.y}, {"h_m", u.h}});
  j["deployment"] = dep;
  j["association"] = std::vector<int>(r.association.uav_of_ue().begin(),
                                      r.association.uav_of_ue().end());
  return j;
}

std::string provenance_header(std::string_view schema, const Scenario* s, const ojson& config) {
  std::ostringstream h;
  h << "# schema: " << schema << '\n';
  h << "# git_describe: " << git_describe() << '\n';
  if (s) {
    h << "# scenario_seed: " << s->seed << '\n';
    h << "# scenario_hash: " << scenario_hash(*s) << '\n';
  }
  h << "# config: " << config.dump() << '\n';
  return h.str();
}

void write_deployment_csv(const std::filesystem::path& path, const Scenario& s,
                          const OptimizerConfig& cfg, const SolveReport& r) {
  auto out = open_out(path);
  out << provenance_header("uavmec-deployment/1", &s, config_to_json(cfg));
  out << "# method: " << to_string(r.method) << '\n';
  out << "uav_id,x_m,y_m,h_m\n";
  for (int j = 0; j < r.deployment.size(); ++j) {
    const auto& u = r.deployment.uavs[j];
    out << j << ',' << format_double(u.q.x) << ',' << format_double(u.q.y) << ','
        << format_double(u.h) << '\n';
  }
}

void write_association_csv(const std::filesystem::path& path, const Scenario& s,
                           const OptimizerConfig& cfg, const SolveReport& r) {
  auto out = open_out(path);
  out << provenance_header("uavmec-association/1", &s, config_to_json(cfg));
  out << "# method: " << to_string(r.method) << '\n';
  out << "ue_id,uav_id\n";
  for (int i = 0; i < r.association.num_ues(); ++i) out << i << ',' << r.association.uav_of(i) << '\n';
}

}  // namespace uavmec
