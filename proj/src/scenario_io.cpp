#include "nudoa/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "nudoa/error.hpp"

namespace nudoa {

namespace {

using nlohmann::json;

const std::set<std::string> kScenarioKeys = {
    "geometry", "doas_deg", "source_power", "correlation", "noise_diag",
    "snapshots", "runs", "snr_grid_db", "base_seed"};

const std::set<std::string> kHarnessKeys = {
    "sweep", "separation_grid_deg", "method", "estimator", "approach",
    "coarse_step_deg", "refine_tol_deg", "max_cycles", "estimator_max_iters",
    "estimator_rel_tol", "estimator_floor_ratio", "exact_covariance", "workers"};

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void reject_unknown(const json& j, const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& [key, _] : j.items()) {
    if (!a.contains(key) && !b.contains(key)) {
      fail(ErrorKind::Config, "unknown key '" + key + "'");
    }
  }
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("key '") + key + "': " + e.what());
  }
}

std::vector<double> number_list(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array()) fail(ErrorKind::Config, std::string("'") + key + "' must be a list");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(ErrorKind::Config, std::string("'") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

int positive_int(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(ErrorKind::Config, std::string("'") + key + "' must be an integer");
  const auto x = v.get<long long>();
  if (x < 1 || x > 1'000'000'000) fail(ErrorKind::Config, std::string("'") + key + "' out of range");
  return static_cast<int>(x);
}

Scenario scenario_from(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Config, "scenario must be a JSON object");
  for (const char* key : {"geometry", "doas_deg", "noise_diag", "snapshots"}) {
    if (!j.contains(key)) fail(ErrorKind::Config, std::string("missing key '") + key + "'");
  }
  const json& g = j.at("geometry");
  if (!g.is_object()) fail(ErrorKind::Config, "'geometry' must be an object");
  for (const auto& [key, _] : g.items()) {
    if (key != "type" && key != "sensors") {
      fail(ErrorKind::Config, "unknown geometry key '" + key + "'");
    }
  }
  if (get_as<std::string>(g, "type") != "ula") {
    fail(ErrorKind::Config, "only geometry type 'ula' is supported");
  }

  try {
    Scenario sc;
    sc.geometry = ArrayGeometry::ula(positive_int(g, "sensors"));
    sc.doas_deg = number_list(j, "doas_deg");
    sc.noise_diag = NoiseDiag(number_list(j, "noise_diag"));
    sc.snapshots = positive_int(j, "snapshots");
    if (j.contains("source_power")) sc.source_power = get_as<double>(j, "source_power");
    if (j.contains("correlation")) sc.correlation = get_as<double>(j, "correlation");
    if (j.contains("runs")) sc.runs = positive_int(j, "runs");
    if (j.contains("snr_grid_db")) sc.snr_grid_db = number_list(j, "snr_grid_db");
    if (j.contains("base_seed")) {
      const json& s = j.at("base_seed");
      if (!s.is_number_unsigned()) {
        fail(ErrorKind::Config, "'base_seed' must be a non-negative integer");
      }
      sc.base_seed = s.get<std::uint64_t>();
    }
    sc.validate();
    return sc;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, e.what());
  }
}

std::vector<double> default_grid(SweepKind sweep) {
  std::vector<double> g;
  if (sweep == SweepKind::Snr) {
    for (int s = -10; s <= 20; s += 5) g.push_back(s);
  } else {
    for (int s = 2; s <= 20; s += 2) g.push_back(s);
  }
  return g;
}

}  // namespace

Scenario parse_scenario_json(std::string_view text) {
  const json j = parse_text(text);
  if (j.is_object()) reject_unknown(j, kScenarioKeys, {});
  return scenario_from(j);
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario_json(read_file(path));
}

BenchmarkSpec parse_benchmark_json(std::string_view text) {
  const json j = parse_text(text);
  if (!j.is_object()) fail(ErrorKind::Config, "configuration must be a JSON object");
  reject_unknown(j, kScenarioKeys, kHarnessKeys);

  json scenario_part = json::object();
  for (const auto& [key, value] : j.items()) {
    if (kScenarioKeys.contains(key)) scenario_part[key] = value;
  }

  BenchmarkSpec spec;
  spec.scenario = scenario_from(scenario_part);

  if (j.contains("sweep")) {
    const auto s = get_as<std::string>(j, "sweep");
    if (s == "snr") {
      spec.sweep = SweepKind::Snr;
    } else if (s == "separation") {
      spec.sweep = SweepKind::Separation;
    } else {
      fail(ErrorKind::Config, "sweep must be 'snr' or 'separation'");
    }
  }
  if (spec.sweep == SweepKind::Snr) {
    if (j.contains("separation_grid_deg")) {
      fail(ErrorKind::Config, "separation_grid_deg requires sweep = 'separation'");
    }
    spec.grid = spec.scenario.snr_grid_db.empty() ? default_grid(SweepKind::Snr)
                                                  : spec.scenario.snr_grid_db;
  } else {
    spec.grid = j.contains("separation_grid_deg") ? number_list(j, "separation_grid_deg")
                                                  : default_grid(SweepKind::Separation);
  }

  if (j.contains("method")) {
    const json& m = j.at("method");
    std::vector<std::string> names;
    if (m.is_string()) {
      names.push_back(m.get<std::string>());
    } else if (m.is_array()) {
      for (const auto& x : m) {
        if (!x.is_string()) fail(ErrorKind::Config, "'method' entries must be strings");
        names.push_back(x.get<std::string>());
      }
    } else {
      fail(ErrorKind::Config, "'method' must be a string or a list of strings");
    }
    if (!(names.size() == 1 && names[0] == "all")) {
      spec.doa_methods.clear();
      for (const auto& n : names) spec.doa_methods.push_back(parse_doa_method_spec(n));
    }
  }
  if (j.contains("estimator")) {
    const NoiseEstimator est = parse_noise_estimator(get_as<std::string>(j, "estimator"));
    std::erase_if(spec.doa_methods, [&](const DoaMethodSpec& ms) { return ms.estimator != est; });
    if (spec.doa_methods.empty()) {
      fail(ErrorKind::Config, "'estimator' excludes every selected method");
    }
  }
  if (j.contains("approach")) {
    const json& a = j.at("approach");
    spec.approaches.clear();
    if (a.is_number_integer()) {
      spec.approaches.push_back(approach_from_int(a.get<int>()));
    } else if (a.is_array()) {
      for (const auto& x : a) {
        if (!x.is_number_integer()) fail(ErrorKind::Config, "'approach' entries must be integers");
        spec.approaches.push_back(approach_from_int(x.get<int>()));
      }
    } else {
      fail(ErrorKind::Config, "'approach' must be 1, 2, 3 or a list of them");
    }
  }
  if (j.contains("coarse_step_deg")) spec.search.coarse_step_deg = get_as<double>(j, "coarse_step_deg");
  if (j.contains("refine_tol_deg")) spec.search.refine_tol_deg = get_as<double>(j, "refine_tol_deg");
  if (j.contains("max_cycles")) spec.search.max_cycles = positive_int(j, "max_cycles");
  if (j.contains("estimator_max_iters")) spec.estimator.max_iters = positive_int(j, "estimator_max_iters");
  if (j.contains("estimator_rel_tol")) spec.estimator.rel_tol = get_as<double>(j, "estimator_rel_tol");
  if (j.contains("estimator_floor_ratio")) {
    spec.estimator.floor_ratio = get_as<double>(j, "estimator_floor_ratio");
  }
  if (j.contains("exact_covariance")) spec.exact_covariance = get_as<bool>(j, "exact_covariance");
  if (j.contains("workers")) spec.workers = positive_int(j, "workers");

  try {
    spec.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, e.what());
  }
  return spec;
}

BenchmarkSpec load_benchmark(const std::filesystem::path& path) {
  return parse_benchmark_json(read_file(path));
}

}  // namespace nudoa
