#include "bench_cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo source enumeration success counts (AIC, MDL, EEF)"};
  app.set_version_flag("--version", nudoa_version());
  bench_cli::Args args;
  bench_cli::add_common(app, args);
  app.add_option("--approach", args.approach, "Only this way of computing L'")
      ->check(CLI::Range(1, 3));
  if (int rc = bench_cli::parse(app, argc, argv); rc >= 0) return rc;
  return bench_cli::run(args, nudoa_run_enum_bench);
}
