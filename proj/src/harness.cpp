#include "nudoa/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "nudoa/error.hpp"

namespace nudoa {

namespace {

// Runs task(i) for i in [0, count) on `workers` threads. Each task writes
// only its own output slot, so the result does not depend on scheduling.
template <class Task>
void parallel_for(std::size_t count, int workers, Task&& task) {
  const auto n_threads =
      static_cast<std::size_t>(std::clamp<long>(workers, 1, static_cast<long>(std::max<std::size_t>(count, 1))));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_threads);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

HermitianMatrix run_covariance(const BenchmarkSpec& spec, const Scenario& sc, std::size_t run) {
  if (spec.exact_covariance) return model_covariance(sc);
  return sample_covariance(synthesize_snapshots(sc, run));
}

const char* criterion_name(int c) {
  static constexpr const char* kNames[] = {"aic", "mdl", "eef"};
  return kNames[c];
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    return a.method < b.method;
  });
}

}  // namespace

std::string DoaMethodSpec::name() const {
  return std::string(to_string(method)) + "-" +
         (estimator == NoiseEstimator::Imlse ? "imlse" : "noniter");
}

DoaMethodSpec parse_doa_method_spec(std::string_view name) {
  const auto dash = name.find('-');
  if (dash == std::string_view::npos) {
    fail(ErrorKind::Config, "method must look like sml-imlse, got '" + std::string(name) + "'");
  }
  return {parse_noise_estimator(name.substr(dash + 1)), parse_doa_method(name.substr(0, dash))};
}

std::vector<DoaMethodSpec> all_doa_methods() {
  return {{NoiseEstimator::Imlse, DoaMethod::Sml},
          {NoiseEstimator::Noniterative, DoaMethod::Sml},
          {NoiseEstimator::Imlse, DoaMethod::Dml},
          {NoiseEstimator::Noniterative, DoaMethod::Dml}};
}

void BenchmarkSpec::validate() const {
  scenario.validate();
  search.validate();
  estimator.validate();
  if (grid.empty()) fail(ErrorKind::Config, "sweep grid is empty");
  if (doa_methods.empty() && approaches.empty()) {
    fail(ErrorKind::Config, "no methods selected");
  }
  if (workers < 1) fail(ErrorKind::Config, "workers must be >= 1");
  if (sweep == SweepKind::Separation) {
    if (scenario.sources() != 2) {
      fail(ErrorKind::Config, "separation sweep needs exactly two sources");
    }
    if (scenario.snr_grid_db.size() > 1) {
      fail(ErrorKind::Config, "separation sweep takes at most one snr_grid_db entry");
    }
  }
  for (double v : grid) {
    (void)scenario_at(*this, v);
  }
}

Scenario scenario_at(const BenchmarkSpec& spec, double sweep_value) {
  Scenario sc = spec.scenario;
  const int m = sc.geometry.sensors();
  if (spec.sweep == SweepKind::Snr) {
    sc.source_power = required_sigma_s2(sweep_value, sc.noise_diag, m);
  } else {
    if (sc.doas_deg.size() != 2) {
      fail(ErrorKind::Config, "separation sweep needs exactly two sources");
    }
    sc.doas_deg[1] = sc.doas_deg[0] + sweep_value;
    if (sc.snr_grid_db.size() == 1) {
      sc.source_power = required_sigma_s2(sc.snr_grid_db[0], sc.noise_diag, m);
    }
  }
  sc.validate();
  return sc;
}

double rmse(std::span<const double> truth_deg, const std::vector<std::vector<double>>& estimates) {
  if (estimates.empty()) {
    fail(ErrorKind::InvalidArgument, "RMSE over zero runs");
  }
  double sum = 0.0;
  for (const auto& run : estimates) {
    if (run.size() != truth_deg.size()) {
      fail(ErrorKind::InvalidArgument, "estimate count differs from the number of sources");
    }
    for (std::size_t l = 0; l < run.size(); ++l) {
      const double e = run[l] - truth_deg[l];
      sum += e * e;
    }
  }
  const double denom = static_cast<double>(estimates.size() * truth_deg.size());
  return std::sqrt(sum / denom);
}

std::vector<ResultRow> run_doa_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  if (spec.doa_methods.empty()) fail(ErrorKind::Config, "no DOA methods selected");
  const auto runs = static_cast<std::size_t>(spec.scenario.runs);
  const std::size_t points = spec.grid.size();
  const std::size_t n_methods = spec.doa_methods.size();

  // estimates[(point * runs + run) * n_methods + method]; empty optional = failure
  std::vector<std::optional<std::vector<double>>> estimates(points * runs * n_methods);

  parallel_for(points * runs, spec.workers, [&](std::size_t task) {
    const std::size_t point = task / runs;
    const std::size_t run = task % runs;
    const Scenario sc = scenario_at(spec, spec.grid[point]);
    const HermitianMatrix r_hat = run_covariance(spec, sc, run);

    std::map<NoiseEstimator, std::optional<NoiseDiag>> noise;
    for (const auto& ms : spec.doa_methods) {
      if (noise.contains(ms.estimator)) continue;
      try {
        noise[ms.estimator] = estimate_noise(ms.estimator, r_hat, sc.sources(), spec.estimator).q_hat;
      } catch (const Error&) {
        noise[ms.estimator] = std::nullopt;
      }
    }
    for (std::size_t k = 0; k < n_methods; ++k) {
      const auto& ms = spec.doa_methods[k];
      const auto& q_hat = noise[ms.estimator];
      if (!q_hat) continue;
      try {
        estimates[task * n_methods + k] =
            estimate_doa(sc.geometry, r_hat, sc.sources(), *q_hat, ms.method, spec.search)
                .psi_hat_deg;
      } catch (const Error&) {
      }
    }
  });

  std::vector<ResultRow> rows;
  for (std::size_t point = 0; point < points; ++point) {
    const Scenario sc = scenario_at(spec, spec.grid[point]);
    std::vector<double> truth = sc.doas_deg;
    std::sort(truth.begin(), truth.end());
    for (std::size_t k = 0; k < n_methods; ++k) {
      std::vector<std::vector<double>> ok;
      int failures = 0;
      for (std::size_t run = 0; run < runs; ++run) {
        const auto& e = estimates[(point * runs + run) * n_methods + k];
        if (e) {
          ok.push_back(*e);
        } else {
          ++failures;
        }
      }
      ResultRow row;
      row.sweep_value = spec.grid[point];
      row.method = spec.doa_methods[k].name();
      row.runs = static_cast<int>(ok.size());
      row.failures = failures;
      row.rmse_deg = ok.empty() ? std::nan("") : rmse(truth, ok);
      rows.push_back(std::move(row));
    }
  }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> run_enum_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  if (spec.approaches.empty()) fail(ErrorKind::Config, "no enumeration approaches selected");
  const auto runs = static_cast<std::size_t>(spec.scenario.runs);
  const std::size_t points = spec.grid.size();
  const std::size_t n_app = spec.approaches.size();
  const int m = spec.scenario.geometry.sensors();
  const EnumerationOptions opts{spec.estimator, spec.search};
  const bool need_imlse =
      std::any_of(spec.approaches.begin(), spec.approaches.end(),
                  [](Approach a) { return a != Approach::NoniterativeSml; });

  // picks[(point * runs + run) * n_app + approach] = {q_aic, q_mdl, q_eef}
  std::vector<std::optional<std::array<int, 3>>> picks(points * runs * n_app);

  parallel_for(points * runs, spec.workers, [&](std::size_t task) {
    const Scenario sc = scenario_at(spec, spec.grid[task / runs]);
    const HermitianMatrix r_hat = run_covariance(spec, sc, task % runs);

    std::optional<std::vector<NoiseEstimate>> cache;
    if (need_imlse) {
      try {
        std::vector<NoiseEstimate> c;
        for (int q = 0; q < m; ++q) c.push_back(imlse_estimate(r_hat, q, spec.estimator));
        cache = std::move(c);
      } catch (const Error&) {
      }
    }
    for (std::size_t k = 0; k < n_app; ++k) {
      const Approach a = spec.approaches[k];
      if (a != Approach::NoniterativeSml && !cache) continue;
      try {
        const LprimeProfile profile =
            lprime_profile(sc.geometry, r_hat, a, opts, cache ? &*cache : nullptr);
        const EnumerationResult res = score_profile(profile, sc.snapshots);
        picks[task * n_app + k] = std::array<int, 3>{res.q_aic, res.q_mdl, res.q_eef};
      } catch (const Error&) {
      }
    }
  });

  std::vector<ResultRow> rows;
  for (std::size_t point = 0; point < points; ++point) {
    const int q_true = scenario_at(spec, spec.grid[point]).sources();
    for (std::size_t k = 0; k < n_app; ++k) {
      for (int c = 0; c < 3; ++c) {
        ResultRow row;
        row.sweep_value = spec.grid[point];
        row.method = "approach" + std::to_string(static_cast<int>(spec.approaches[k])) + "-" +
                     criterion_name(c);
        int success = 0;
        for (std::size_t run = 0; run < runs; ++run) {
          const auto& p = picks[(point * runs + run) * n_app + k];
          if (!p) {
            ++row.failures;
            continue;
          }
          ++row.runs;
          if ((*p)[static_cast<std::size_t>(c)] == q_true) ++success;
        }
        row.success_count = success;
        rows.push_back(std::move(row));
      }
    }
  }
  sort_rows(rows);
  return rows;
}

double max_failure_fraction(const std::vector<ResultRow>& rows) {
  double worst = 0.0;
  for (const auto& r : rows) {
    const int total = r.runs + r.failures;
    if (total > 0) worst = std::max(worst, static_cast<double>(r.failures) / total);
  }
  return worst;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = "sweep_value,method,rmse_deg,success_count,runs,failures\n";
  for (const auto& r : rows) {
    out += format_number(r.sweep_value);
    out += ',';
    out += r.method;
    out += ',';
    if (r.rmse_deg) out += format_number(*r.rmse_deg);
    out += ',';
    if (r.success_count) out += std::to_string(*r.success_count);
    out += ',';
    out += std::to_string(r.runs);
    out += ',';
    out += std::to_string(r.failures);
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("sweep_value,", 0) != 0) {
    fail(ErrorKind::InvalidArgument, "CSV header missing");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 6) fail(ErrorKind::InvalidArgument, "CSV row needs 6 fields: " + line);
    ResultRow r;
    r.sweep_value = std::stod(f[0]);
    r.method = f[1];
    if (!f[2].empty()) r.rmse_deg = std::stod(f[2]);
    if (!f[3].empty()) r.success_count = std::stoi(f[3]);
    r.runs = std::stoi(f[4]);
    r.failures = std::stoi(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_plotdata(const std::vector<ResultRow>& rows) {
  std::set<std::string> method_set;
  std::set<double> sweep_set;
  std::map<std::pair<double, std::string>, double> value;
  for (const auto& r : rows) {
    method_set.insert(r.method);
    sweep_set.insert(r.sweep_value);
    const double v = r.rmse_deg ? *r.rmse_deg
                                : (r.success_count ? static_cast<double>(*r.success_count)
                                                   : std::nan(""));
    value[{r.sweep_value, r.method}] = v;
  }
  std::string out = "# sweep_value";
  for (const auto& m : method_set) out += " " + m;
  out += '\n';
  for (double s : sweep_set) {
    out += format_number(s);
    for (const auto& m : method_set) {
      const auto it = value.find({s, m});
      out += ' ';
      out += it == value.end() ? "nan" : format_number(it->second);
    }
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  f << content;
  f.flush();
  if (!f) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  write_file(path, format_csv(rows));
}

void emit_plotdata(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  write_file(path, format_plotdata(rows));
}

}  // namespace nudoa
