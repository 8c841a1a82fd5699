#pragma once

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nudoa/nudoa.h"

namespace bench_cli {

enum ExitCode { kOk = 0, kRuntime = 1, kConfig = 2, kTooManyFailures = 3 };

using RunFn = nudoa_status (*)(const nudoa_scenario*, const nudoa_bench_options*,
                               nudoa_results**);

struct Args {
  std::string scenario;
  std::string out;
  std::string plotdata;
  std::optional<long long> runs;
  std::optional<unsigned long long> seed;
  int workers = 0;
  std::string method;
  int approach = 0;
};

inline int report(nudoa_status status, const char* what) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", what, nudoa_last_error(),
               nudoa_status_name(status));
  switch (status) {
    case NUDOA_ERR_CONFIG:
    case NUDOA_ERR_INVALID_ARGUMENT:
    case NUDOA_ERR_DOMAIN:
      return kConfig;
    default:
      return kRuntime;
  }
}

inline int run(const Args& args, RunFn fn) {
  nudoa_scenario* raw = nullptr;
  if (nudoa_status s = nudoa_scenario_load(args.scenario.c_str(), &raw); s != NUDOA_OK) {
    // An unreadable scenario file is a configuration problem for the caller.
    report(s, "loading scenario");
    return kConfig;
  }
  std::unique_ptr<nudoa_scenario, decltype(&nudoa_scenario_free)> scenario(raw,
                                                                            nudoa_scenario_free);

  nudoa_bench_options opts{};
  if (args.runs) opts.runs = *args.runs;
  opts.workers = args.workers;
  opts.approach = args.approach;
  if (args.seed) {
    opts.has_seed = 1;
    opts.seed = *args.seed;
  }
  opts.method = args.method.empty() ? nullptr : args.method.c_str();

  nudoa_results* raw_results = nullptr;
  if (nudoa_status s = fn(scenario.get(), &opts, &raw_results); s != NUDOA_OK) {
    return report(s, "benchmark");
  }
  std::unique_ptr<nudoa_results, decltype(&nudoa_results_free)> results(raw_results,
                                                                         nudoa_results_free);

  if (nudoa_status s = nudoa_results_write_csv(results.get(), args.out.c_str()); s != NUDOA_OK) {
    return report(s, "writing csv");
  }
  if (!args.plotdata.empty()) {
    if (nudoa_status s = nudoa_results_write_plotdata(results.get(), args.plotdata.c_str());
        s != NUDOA_OK) {
      return report(s, "writing plot data");
    }
  }

  const double failed = nudoa_results_max_failure_fraction(results.get());
  if (failed > 0.5) {
    std::fprintf(stderr, "error: %.0f%% of runs failed at the worst sweep point\n", 100.0 * failed);
    return kTooManyFailures;
  }
  return kOk;
}

inline void add_common(CLI::App& app, Args& args) {
  app.add_option("--scenario", args.scenario, "Scenario JSON file")->required();
  app.add_option("--out", args.out, "Output CSV path")->required();
  app.add_option("--runs", args.runs, "Monte Carlo runs per sweep point")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", args.seed, "Base seed");
  app.add_option("--workers", args.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--plotdata", args.plotdata, "Also write gnuplot-ready columns here");
}

inline int parse(CLI::App& app, int argc, char** argv) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  return -1;
}

}  // namespace bench_cli
