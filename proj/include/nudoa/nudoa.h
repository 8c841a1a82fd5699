/*
 * C interface to the nonuniform-noise DOA estimation and source enumeration
 * library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a nudoa_status; on
 * failure nudoa_last_error() describes the problem. The message is
 * thread-local and stays valid until the next failing call on the same
 * thread.
 *
 * Complex buffers are interleaved (re, im) doubles in column-major order:
 * element (r, c) of an M x N matrix lives at index 2 * (c * M + r).
 */
#ifndef NUDOA_NUDOA_H
#define NUDOA_NUDOA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NUDOA_BUILDING_LIBRARY)
#    define NUDOA_API __declspec(dllexport)
#  else
#    define NUDOA_API __declspec(dllimport)
#  endif
#else
#  define NUDOA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nudoa_status {
  NUDOA_OK = 0,
  NUDOA_ERR_INVALID_ARGUMENT = 1,
  NUDOA_ERR_DOMAIN = 2,
  NUDOA_ERR_NUMERIC = 3,
  NUDOA_ERR_DATA = 4,
  NUDOA_ERR_CONFIG = 5,
  NUDOA_ERR_IO = 6,
  NUDOA_ERR_INTERNAL = 7
} nudoa_status;

typedef struct nudoa_scenario nudoa_scenario;
typedef struct nudoa_results nudoa_results;

/* Options applied on top of a loaded configuration. Zero / NULL fields keep
 * the configuration's value. */
typedef struct nudoa_bench_options {
  int64_t runs;        /* overrides "runs" when > 0 */
  int32_t workers;     /* worker threads when > 0 */
  int32_t approach;    /* 1, 2 or 3; 0 keeps the configured approaches */
  int32_t has_seed;    /* nonzero: use `seed` as base_seed */
  uint64_t seed;
  const char* method;  /* sml-imlse | sml-noniter | dml-imlse | dml-noniter */
} nudoa_bench_options;

typedef struct nudoa_result_row {
  double sweep_value;
  const char* method;    /* owned by the results handle */
  double rmse_deg;       /* NaN for enumeration rows */
  int32_t success_count; /* -1 for DOA rows */
  int32_t runs;
  int32_t failures;
} nudoa_result_row;

NUDOA_API const char* nudoa_version(void);
NUDOA_API const char* nudoa_status_name(nudoa_status status);
NUDOA_API const char* nudoa_last_error(void);

/* Benchmark configuration (scenario JSON plus optional harness keys). */
NUDOA_API nudoa_status nudoa_scenario_load(const char* path, nudoa_scenario** out);
NUDOA_API nudoa_status nudoa_scenario_parse(const char* json_text, nudoa_scenario** out);
NUDOA_API void nudoa_scenario_free(nudoa_scenario* scenario);
NUDOA_API nudoa_status nudoa_scenario_sensor_count(const nudoa_scenario* scenario, int32_t* out);
NUDOA_API nudoa_status nudoa_scenario_source_count(const nudoa_scenario* scenario, int32_t* out);

NUDOA_API nudoa_status nudoa_run_doa_bench(const nudoa_scenario* scenario,
                                           const nudoa_bench_options* options,
                                           nudoa_results** out);
NUDOA_API nudoa_status nudoa_run_enum_bench(const nudoa_scenario* scenario,
                                            const nudoa_bench_options* options,
                                            nudoa_results** out);

NUDOA_API size_t nudoa_results_count(const nudoa_results* results);
NUDOA_API nudoa_status nudoa_results_row(const nudoa_results* results, size_t index,
                                         nudoa_result_row* out);
/* Largest failed-run fraction over all rows, in [0, 1]. */
NUDOA_API double nudoa_results_max_failure_fraction(const nudoa_results* results);
NUDOA_API nudoa_status nudoa_results_write_csv(const nudoa_results* results, const char* path);
NUDOA_API nudoa_status nudoa_results_write_plotdata(const nudoa_results* results,
                                                    const char* path);
NUDOA_API void nudoa_results_free(nudoa_results* results);

/* Noise powers for a ULA sample covariance; `estimator` is "imlse" or
 * "noniterative". `powers_out` receives `sensors` values. */
NUDOA_API nudoa_status nudoa_estimate_noise(int32_t sensors, const double* r_hat,
                                            int32_t sources, const char* estimator,
                                            double* powers_out, int32_t* iterations_out);

/* DOAs in degrees (ascending) for a ULA sample covariance. `method` uses the
 * benchmark names, e.g. "sml-imlse". `doas_out` receives `sources` values. */
NUDOA_API nudoa_status nudoa_estimate_doa(int32_t sensors, const double* r_hat,
                                          int32_t sources, const char* method,
                                          double* doas_out);

/* Source count picked by AIC, MDL and EEF from an M x N snapshot block. */
NUDOA_API nudoa_status nudoa_enumerate(int32_t sensors, int32_t snapshots, const double* x,
                                       int32_t approach, int32_t* q_aic, int32_t* q_mdl,
                                       int32_t* q_eef);

#ifdef __cplusplus
}
#endif

#endif /* NUDOA_NUDOA_H */
