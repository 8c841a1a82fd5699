#pragma once

#include <filesystem>
#include <string_view>

#include "nudoa/array_model.hpp"
#include "nudoa/harness.hpp"

namespace nudoa {

// Scenario files are JSON objects:
//
//   {"geometry": {"type": "ula", "sensors": 6},
//    "doas_deg": [-3, 4], "source_power": 1.0, "correlation": 0.0,
//    "noise_diag": [9, 1, 25, 0.25, 6.25, 25],
//    "snapshots": 300, "runs": 100, "snr_grid_db": [-10, -5, 0],
//    "base_seed": 1}
//
// Benchmark configurations are scenario files that may additionally carry
// harness keys: sweep ("snr" | "separation"), separation_grid_deg, method
// (name or list of names, or "all"), estimator ("imlse" | "noniterative"),
// approach (1 | 2 | 3 or a list), coarse_step_deg, refine_tol_deg,
// max_cycles, estimator_max_iters, estimator_rel_tol, estimator_floor_ratio,
// exact_covariance and
// workers. Any other key is rejected with Error(Config).

Scenario parse_scenario_json(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

BenchmarkSpec parse_benchmark_json(std::string_view text);
BenchmarkSpec load_benchmark(const std::filesystem::path& path);

}  // namespace nudoa
