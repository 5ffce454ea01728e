#include "uavmec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "uavmec/report.hpp"

namespace uavmec {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw SpecError("spec." + key + ": " + what);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& prefix = "") {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(prefix + key, j.contains(key) ? "wrong type" : "missing");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string header(const ExperimentSpec& spec, std::string_view schema) {
  std::string h = provenance_header(schema, nullptr, config_to_json(spec.config));
  h += "# spec: " + spec_to_json(spec).dump() + '\n';
  return h;
}

}  // namespace

std::string_view to_string(SweepVariable v) {
  return v == SweepVariable::NumUes ? "num_ues" : "num_uavs";
}

void validate(const ExperimentSpec& s) {
  if (s.methods.empty()) fail("methods", "at least one method required");
  if (s.values.empty()) fail("sweep.values", "at least one value required");
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (s.values[k] < 1) fail("sweep.values", "values must be >= 1");
    if (k > 0 && s.values[k] <= s.values[k - 1]) fail("sweep.values", "must be strictly increasing");
  }
  if (s.seeds_per_point < 1) fail("seeds.count", "must be >= 1");
  if (s.variable == SweepVariable::NumUes && s.num_uavs < 1) fail("num_uavs", "must be >= 1");
  if (s.variable == SweepVariable::NumUavs && s.num_ues < 1) fail("num_ues", "must be >= 1");
  try {
    validate(s.config);
  } catch (const std::invalid_argument& e) {
    fail("config", e.what());
  }
}

ExperimentSpec spec_from_json(const json& j, const std::filesystem::path& relative_to) {
  if (!j.is_object()) throw SpecError("spec: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    static const std::vector<std::string> known{
        "schema_version", "sweep", "num_ues", "num_uavs", "methods", "seeds",
        "base_scenario", "tasks", "config", "record_wall_time"};
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(key, "unknown key");
  }
  if (get<int>(j, "schema_version") != kSweepSchemaVersion)
    fail("schema_version", "unsupported, expected " + std::to_string(kSweepSchemaVersion));

  ExperimentSpec s;
  if (!j.contains("sweep") || !j.at("sweep").is_object()) fail("sweep", "missing or not an object");
  const json& sweep = j.at("sweep");
  const auto var = get<std::string>(sweep, "variable", "sweep.");
  if (var == "num_ues") {
    s.variable = SweepVariable::NumUes;
    s.num_uavs = get<int>(j, "num_uavs");
  } else if (var == "num_uavs") {
    s.variable = SweepVariable::NumUavs;
    s.num_ues = get<int>(j, "num_ues");
  } else {
    fail("sweep.variable", "expected num_ues or num_uavs");
  }
  try {
    s.values = sweep.at("values").get<std::vector<int>>();
  } catch (const json::exception&) {
    fail("sweep.values", "expected an array of integers");
  }
  for (const auto& name : get<std::vector<std::string>>(j, "methods")) {
    try {
      s.methods.push_back(parse_method(name));
    } catch (const std::invalid_argument&) {
      fail("methods", "unknown method '" + name + "'");
    }
  }
  if (j.contains("seeds")) {
    const json& seeds = j.at("seeds");
    s.first_seed = get<std::uint64_t>(seeds, "first", "seeds.");
    s.seeds_per_point = get<int>(seeds, "count", "seeds.");
  }
  if (j.contains("base_scenario")) {
    std::filesystem::path p = get<std::string>(j, "base_scenario");
    if (p.is_relative() && !relative_to.empty()) p = relative_to / p;
    s.base = load(p);
  }
  if (j.contains("tasks")) {
    const json& t = j.at("tasks");
    if (t.contains("data_bits_min")) s.tasks.data_bits_min = get<double>(t, "data_bits_min", "tasks.");
    if (t.contains("data_bits_max")) s.tasks.data_bits_max = get<double>(t, "data_bits_max", "tasks.");
    if (t.contains("cycles_per_bit")) s.tasks.cycles_per_bit = get<double>(t, "cycles_per_bit", "tasks.");
    if (t.contains("tx_power_w")) s.tasks.tx_power_w = get<double>(t, "tx_power_w", "tasks.");
  }
  if (j.contains("config")) {
    try {
      s.config = config_from_json(j.at("config"));
    } catch (const std::exception& e) {
      fail("config", e.what());
    }
  }
  if (j.contains("record_wall_time")) s.record_wall_time = get<bool>(j, "record_wall_time");
  validate(s);
  return s;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
  return spec_from_json(j, path.parent_path());
}

ojson spec_to_json(const ExperimentSpec& s) {
  ojson j;
  j["schema_version"] = kSweepSchemaVersion;
  j["sweep"] = {{"variable", std::string(to_string(s.variable))}, {"values", s.values}};
  if (s.variable == SweepVariable::NumUes)
    j["num_uavs"] = s.num_uavs;
  else
    j["num_ues"] = s.num_ues;
  std::vector<std::string> names;
  for (Method m : s.methods) names.emplace_back(to_string(m));
  j["methods"] = names;
  j["seeds"] = {{"first", s.first_seed}, {"count", s.seeds_per_point}};
  if (s.base) j["base_scenario_hash"] = scenario_hash(*s.base);
  j["tasks"] = {{"data_bits_min", s.tasks.data_bits_min},
                {"data_bits_max", s.tasks.data_bits_max},
                {"cycles_per_bit", s.tasks.cycles_per_bit},
                {"tx_power_w", s.tasks.tx_power_w}};
  j["config"] = config_to_json(s.config);
  j["record_wall_time"] = s.record_wall_time;
  return j;
}

Scenario sweep_scenario(const ExperimentSpec& spec, int value, std::uint64_t seed) {
  FleetConfig fleet = spec.base ? spec.base->fleet : FleetConfig{};
  const ChannelParams channel = spec.base ? spec.base->channel : ChannelParams{};
  int n = spec.num_ues;
  if (spec.variable == SweepVariable::NumUes) {
    n = value;
    fleet.num_uavs = spec.num_uavs;
  } else {
    fleet.num_uavs = value;
  }
  return generate(seed, n, fleet, channel, spec.tasks);
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, int jobs) {
  validate(spec);
  std::vector<SweepRow> rows;
  for (int value : spec.values)
    for (int k = 0; k < spec.seeds_per_point; ++k)
      for (Method m : spec.methods) {
        SweepRow r;
        r.value = value;
        r.seed = spec.first_seed + static_cast<std::uint64_t>(k);
        r.method = m;
        rows.push_back(r);
      }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
      SweepRow& r = rows[i];
      try {
        const Scenario s = sweep_scenario(spec, r.value, r.seed);
        r.report = solve(r.method, s, spec.config);
        r.status = r.report.converged ? "converged" : "iter_limit";
      } catch (const std::exception& e) {
        r.status = std::string("error: ") + e.what();
      }
      if (!spec.record_wall_time) r.report.wall_ms = 0.0;
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(rows.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::vector<SummaryRow> summarize(const ExperimentSpec& spec, const std::vector<SweepRow>& rows) {
  std::vector<SummaryRow> out;
  for (int value : spec.values)
    for (Method m : spec.methods) {
      std::vector<double> mus;
      for (const auto& r : rows)
        if (r.value == value && r.method == m && r.status.rfind("error", 0) != 0)
          mus.push_back(r.report.mu);
      SummaryRow s{value, m, static_cast<int>(mus.size()), 0.0, 0.0};
      if (!mus.empty()) {
        for (double x : mus) s.mean_mu += x;
        s.mean_mu /= static_cast<double>(mus.size());
        if (mus.size() > 1) {
          double ss = 0.0;
          for (double x : mus) ss += (x - s.mean_mu) * (x - s.mean_mu);
          s.std_mu = std::sqrt(ss / static_cast<double>(mus.size() - 1));
        }
      }
      out.push_back(s);
    }
  return out;
}

std::string results_csv(const ExperimentSpec& spec, const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << header(spec, "uavmec-sweep-results/1");
  o << "sweep_var,value,method,seed,mu_s,iters,wall_ms,status\n";
  for (const auto& r : rows) {
    const bool error = r.status.rfind("error", 0) == 0;
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    o << to_string(spec.variable) << ',' << r.value << ',' << to_string(r.method) << ','
      << r.seed << ',' << (error ? "" : format_double(r.report.mu)) << ','
      << (error ? "" : std::to_string(r.report.iterations)) << ','
      << (spec.record_wall_time && !error ? format_double(r.report.wall_ms) : "NA") << ','
      << status << '\n';
  }
  return o.str();
}

std::string summary_csv(const ExperimentSpec& spec, const std::vector<SummaryRow>& rows) {
  std::ostringstream o;
  o << header(spec, "uavmec-sweep-summary/1");
  o << "sweep_var,value,method,n,mean_mu_s,std_mu_s\n";
  for (const auto& r : rows)
    o << to_string(spec.variable) << ',' << r.value << ',' << to_string(r.method) << ','
      << r.count << ',' << (r.count ? format_double(r.mean_mu) : "") << ','
      << (r.count ? format_double(r.std_mu) : "") << '\n';
  return o.str();
}

std::string summary_svg(const ExperimentSpec& spec, const std::vector<SummaryRow>& rows) {
  constexpr double W = 640, H = 420, L = 70, R = 130, T = 30, B = 55;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : rows)
    if (r.count) {
      lo = std::min(lo, r.mean_mu);
      hi = std::max(hi, r.mean_mu);
    }
  if (!(lo <= hi)) lo = 0, hi = 1;
  const double pad = std::max(1e-9, 0.08 * (hi - lo));
  lo -= pad;
  hi += pad;
  const double x0 = spec.values.front(), x1 = spec.values.back();
  auto px = [&](double v) {
    return x1 > x0 ? L + (v - x0) / (x1 - x0) * (W - L - R) : L + 0.5 * (W - L - R);
  };
  auto py = [&](double mu) { return T + (hi - mu) / (hi - lo) * (H - T - B); };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.1f", v);
    return std::string(b);
  };
  static const std::map<Method, const char*> colour{{Method::Proposed, "#d62728"},
                                                    {Method::Hpo, "#1f77b4"},
                                                    {Method::Vpo, "#2ca02c"},
                                                    {Method::Clbo, "#9467bd"}};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  for (int v : spec.values)
    o << "<text x=\"" << num(px(v)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << v
      << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double mu = lo + (hi - lo) * k / 4.0;
    char label[32];
    std::snprintf(label, sizeof label, "%.3f", mu);
    o << "<text x=\"" << L - 6 << "\" y=\"" << num(py(mu) + 4) << "\" text-anchor=\"end\">"
      << label << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << num(py(mu)) << "\" x2=\"" << W - R << "\" y2=\""
      << num(py(mu)) << "\" stroke=\"#dddddd\"/>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << (spec.variable == SweepVariable::NumUes ? "number of UEs" : "number of UAVs")
    << "</text>\n";
  o << "<text transform=\"translate(16," << (T + H - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">mean completion time (s)</text>\n";
  int legend = 0;
  for (Method m : spec.methods) {
    const char* c = colour.at(m);
    std::string pts;
    for (const auto& r : rows)
      if (r.method == m && r.count) pts += num(px(r.value)) + "," + num(py(r.mean_mu)) + " ";
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"" << pts
      << "\"/>\n";
    for (const auto& r : rows)
      if (r.method == m && r.count)
        o << "<circle cx=\"" << num(px(r.value)) << "\" cy=\"" << num(py(r.mean_mu))
          << "\" r=\"3.5\" fill=\"" << c << "\"/>\n";
    const double ly = T + 10 + 20 * legend++;
    o << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\""
      << ly << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">" << to_string(m)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_sweep_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                         const std::vector<SweepRow>& rows) {
  std::filesystem::create_directories(dir);
  const auto summary = summarize(spec, rows);
  write_text(dir / "results.csv", results_csv(spec, rows));
  write_text(dir / "summary.csv", summary_csv(spec, summary));
  write_text(dir / "mean_mu.svg", summary_svg(spec, summary));
}

}  // namespace uavmec
