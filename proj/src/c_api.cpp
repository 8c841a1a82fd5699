#include "nudoa/nudoa.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "nudoa/doa_est.hpp"
#include "nudoa/enumeration.hpp"
#include "nudoa/error.hpp"
#include "nudoa/harness.hpp"
#include "nudoa/noise_cov.hpp"
#include "nudoa/scenario_io.hpp"

struct nudoa_scenario {
  nudoa::BenchmarkSpec spec;
};

struct nudoa_results {
  std::vector<nudoa::ResultRow> rows;
};

namespace {

thread_local std::string last_error;

nudoa_status status_of(nudoa::ErrorKind kind) {
  switch (kind) {
    case nudoa::ErrorKind::InvalidArgument: return NUDOA_ERR_INVALID_ARGUMENT;
    case nudoa::ErrorKind::Domain: return NUDOA_ERR_DOMAIN;
    case nudoa::ErrorKind::Numeric: return NUDOA_ERR_NUMERIC;
    case nudoa::ErrorKind::Data: return NUDOA_ERR_DATA;
    case nudoa::ErrorKind::Config: return NUDOA_ERR_CONFIG;
    case nudoa::ErrorKind::Io: return NUDOA_ERR_IO;
  }
  return NUDOA_ERR_INTERNAL;
}

template <class F>
nudoa_status guarded(F&& body) {
  try {
    body();
    return NUDOA_OK;
  } catch (const nudoa::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return NUDOA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return NUDOA_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return NUDOA_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) nudoa::fail(nudoa::ErrorKind::InvalidArgument, what);
}

nudoa::CMatrix complex_matrix(const double* data, int32_t rows, int32_t cols) {
  require(data != nullptr, "null matrix buffer");
  nudoa::CMatrix m(rows, cols);
  for (int32_t c = 0; c < cols; ++c) {
    for (int32_t r = 0; r < rows; ++r) {
      const std::size_t k = 2 * (static_cast<std::size_t>(c) * rows + r);
      m(r, c) = nudoa::Complex(data[k], data[k + 1]);
    }
  }
  return m;
}

nudoa::BenchmarkSpec apply_options(const nudoa_scenario* scenario,
                                   const nudoa_bench_options* options, bool enumeration) {
  require(scenario != nullptr, "null scenario");
  nudoa::BenchmarkSpec spec = scenario->spec;
  if (options == nullptr) return spec;
  if (options->runs < 0) nudoa::fail(nudoa::ErrorKind::Config, "runs must be >= 1");
  if (options->runs > 0) spec.scenario.runs = static_cast<int>(options->runs);
  if (options->workers < 0) nudoa::fail(nudoa::ErrorKind::Config, "workers must be >= 1");
  if (options->workers > 0) spec.workers = options->workers;
  if (options->has_seed != 0) spec.scenario.base_seed = options->seed;
  if (options->method != nullptr && !enumeration) {
    spec.doa_methods = {nudoa::parse_doa_method_spec(options->method)};
  }
  if (options->approach != 0 && enumeration) {
    spec.approaches = {nudoa::approach_from_int(options->approach)};
  }
  spec.validate();
  return spec;
}

}  // namespace

extern "C" {

const char* nudoa_version(void) { return "0.1.0"; }

const char* nudoa_status_name(nudoa_status status) {
  switch (status) {
    case NUDOA_OK: return "ok";
    case NUDOA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NUDOA_ERR_DOMAIN: return "domain error";
    case NUDOA_ERR_NUMERIC: return "numeric error";
    case NUDOA_ERR_DATA: return "data error";
    case NUDOA_ERR_CONFIG: return "configuration error";
    case NUDOA_ERR_IO: return "I/O error";
    case NUDOA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nudoa_last_error(void) { return last_error.c_str(); }

nudoa_status nudoa_scenario_load(const char* path, nudoa_scenario** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new nudoa_scenario{nudoa::load_benchmark(path)};
  });
}

nudoa_status nudoa_scenario_parse(const char* json_text, nudoa_scenario** out) {
  return guarded([&] {
    require(json_text != nullptr && out != nullptr, "null argument");
    *out = new nudoa_scenario{nudoa::parse_benchmark_json(json_text)};
  });
}

void nudoa_scenario_free(nudoa_scenario* scenario) { delete scenario; }

nudoa_status nudoa_scenario_sensor_count(const nudoa_scenario* scenario, int32_t* out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = scenario->spec.scenario.geometry.sensors();
  });
}

nudoa_status nudoa_scenario_source_count(const nudoa_scenario* scenario, int32_t* out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = scenario->spec.scenario.sources();
  });
}

nudoa_status nudoa_run_doa_bench(const nudoa_scenario* scenario,
                                 const nudoa_bench_options* options, nudoa_results** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto spec = apply_options(scenario, options, false);
    *out = new nudoa_results{nudoa::run_doa_benchmark(spec)};
  });
}

nudoa_status nudoa_run_enum_bench(const nudoa_scenario* scenario,
                                  const nudoa_bench_options* options, nudoa_results** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto spec = apply_options(scenario, options, true);
    *out = new nudoa_results{nudoa::run_enum_benchmark(spec)};
  });
}

size_t nudoa_results_count(const nudoa_results* results) {
  return results == nullptr ? 0 : results->rows.size();
}

nudoa_status nudoa_results_row(const nudoa_results* results, size_t index,
                               nudoa_result_row* out) {
  return guarded([&] {
    require(results != nullptr && out != nullptr, "null argument");
    require(index < results->rows.size(), "row index out of range");
    const auto& r = results->rows[index];
    out->sweep_value = r.sweep_value;
    out->method = r.method.c_str();
    out->rmse_deg = r.rmse_deg.value_or(std::nan(""));
    out->success_count = r.success_count.value_or(-1);
    out->runs = r.runs;
    out->failures = r.failures;
  });
}

double nudoa_results_max_failure_fraction(const nudoa_results* results) {
  return results == nullptr ? 0.0 : nudoa::max_failure_fraction(results->rows);
}

nudoa_status nudoa_results_write_csv(const nudoa_results* results, const char* path) {
  return guarded([&] {
    require(results != nullptr && path != nullptr, "null argument");
    nudoa::emit_csv(results->rows, path);
  });
}

nudoa_status nudoa_results_write_plotdata(const nudoa_results* results, const char* path) {
  return guarded([&] {
    require(results != nullptr && path != nullptr, "null argument");
    nudoa::emit_plotdata(results->rows, path);
  });
}

void nudoa_results_free(nudoa_results* results) { delete results; }

nudoa_status nudoa_estimate_noise(int32_t sensors, const double* r_hat, int32_t sources,
                                  const char* estimator, double* powers_out,
                                  int32_t* iterations_out) {
  return guarded([&] {
    require(sensors >= 2 && estimator != nullptr && powers_out != nullptr, "invalid argument");
    const nudoa::HermitianMatrix r(complex_matrix(r_hat, sensors, sensors));
    const auto est =
        nudoa::estimate_noise(nudoa::parse_noise_estimator(estimator), r, sources);
    for (int32_t m = 0; m < sensors; ++m) powers_out[m] = est.q_hat[m];
    if (iterations_out != nullptr) *iterations_out = est.iterations;
  });
}

nudoa_status nudoa_estimate_doa(int32_t sensors, const double* r_hat, int32_t sources,
                                const char* method, double* doas_out) {
  return guarded([&] {
    require(sensors >= 2 && method != nullptr && doas_out != nullptr, "invalid argument");
    const auto geometry = nudoa::ArrayGeometry::ula(sensors);
    const nudoa::HermitianMatrix r(complex_matrix(r_hat, sensors, sensors));
    const auto ms = nudoa::parse_doa_method_spec(method);
    const auto q_hat = nudoa::estimate_noise(ms.estimator, r, sources).q_hat;
    const auto res = nudoa::estimate_doa(geometry, r, sources, q_hat, ms.method);
    for (int32_t l = 0; l < sources; ++l) doas_out[l] = res.psi_hat_deg[static_cast<std::size_t>(l)];
  });
}

nudoa_status nudoa_enumerate(int32_t sensors, int32_t snapshots, const double* x,
                             int32_t approach, int32_t* q_aic, int32_t* q_mdl, int32_t* q_eef) {
  return guarded([&] {
    require(sensors >= 2 && snapshots >= 1, "invalid dimensions");
    require(q_aic != nullptr && q_mdl != nullptr && q_eef != nullptr, "null output");
    const auto geometry = nudoa::ArrayGeometry::ula(sensors);
    const nudoa::SnapshotMatrix block(complex_matrix(x, sensors, snapshots));
    const auto res =
        nudoa::enumerate_sources(geometry, block, nudoa::approach_from_int(approach));
    *q_aic = res.q_aic;
    *q_mdl = res.q_mdl;
    *q_eef = res.q_eef;
  });
}

}  // extern "C"
