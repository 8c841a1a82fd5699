#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nudoa/array_model.hpp"
#include "nudoa/doa_est.hpp"
#include "nudoa/enumeration.hpp"
#include "nudoa/noise_cov.hpp"

namespace nudoa {

enum class SweepKind { Snr, Separation };

/// Noise estimator paired with a DOA criterion, e.g. "sml-imlse".
struct DoaMethodSpec {
  NoiseEstimator estimator = NoiseEstimator::Imlse;
  DoaMethod method = DoaMethod::Sml;

  std::string name() const;
  friend bool operator==(const DoaMethodSpec&, const DoaMethodSpec&) = default;
};

/// Accepts sml-imlse | sml-noniter | dml-imlse | dml-noniter.
DoaMethodSpec parse_doa_method_spec(std::string_view name);
std::vector<DoaMethodSpec> all_doa_methods();

struct BenchmarkSpec {
  Scenario scenario;
  SweepKind sweep = SweepKind::Snr;
  /// SNR values in dB, or separations in degrees from the first source.
  std::vector<double> grid;
  std::vector<DoaMethodSpec> doa_methods = all_doa_methods();
  std::vector<Approach> approaches = {Approach::ImlseFactor, Approach::ImlseSml,
                                      Approach::NoniterativeSml};
  SearchOptions search;
  EstimatorOptions estimator;
  /// Use the exact model covariance instead of sampled snapshots.
  bool exact_covariance = false;
  int workers = 1;

  void validate() const;
};

/// Scenario realized at one sweep point.
///
/// SNR sweeps set the source power for the requested per-source SNR. A
/// separation sweep keeps the first DOA and puts the second one `value`
/// degrees above it; its SNR is the single snr_grid_db entry when present,
/// otherwise the scenario's source power is used as is.
Scenario scenario_at(const BenchmarkSpec& spec, double sweep_value);

struct ResultRow {
  double sweep_value = 0.0;
  std::string method;
  std::optional<double> rmse_deg;    // DOA benchmarks
  std::optional<int> success_count;  // enumeration benchmarks
  int runs = 0;                      // runs that completed
  int failures = 0;                  // runs excluded after an estimator or search error

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Root mean squared angle error over K runs of q sorted estimates.
double rmse(std::span<const double> truth_deg, const std::vector<std::vector<double>>& estimates);

std::vector<ResultRow> run_doa_benchmark(const BenchmarkSpec& spec);
std::vector<ResultRow> run_enum_benchmark(const BenchmarkSpec& spec);

/// Largest failures / (runs + failures) over the rows.
double max_failure_fraction(const std::vector<ResultRow>& rows);

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(std::string_view text);
/// One line per sweep value, one column per method (gnuplot "using" ready).
std::string format_plotdata(const std::vector<ResultRow>& rows);

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
void emit_plotdata(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

}  // namespace nudoa
