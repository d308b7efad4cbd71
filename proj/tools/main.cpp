// remsamp: solve for optimal sampling thresholds and simulate sampling
// policies over an unreliable channel.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "experiment_config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Optimal sampling of a Wiener process over an unreliable channel"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string summary_path;
  std::uint64_t seed = 0;
  int parallel = 1;

  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", config_path, "experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_out) sub->add_option("--out", out_path, "output path (default: stdout or config)");
    sub->add_option("--seed", seed, "override sim.seed");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a configuration without running it");
  add_common(validate, false);
  CLI::App* solve = app.add_subcommand("solve", "optimal threshold and mse_opt");
  add_common(solve, true);
  CLI::App* solve_age = app.add_subcommand("solve-age", "age-optimal threshold");
  add_common(solve_age, true);
  CLI::App* simulate = app.add_subcommand("simulate", "simulate the requested policies");
  add_common(simulate, true);
  std::string trace_path;
  double trace_every = 1.0;
  simulate->add_option("--trace", trace_path, "dump replication 0 as CSV rows policy,t,W,What,age");
  simulate->add_option("--trace-every", trace_every, "minimum time between trace rows")
      ->check(CLI::NonNegativeNumber);
  CLI::App* sweep = app.add_subcommand("sweep", "solve and simulate every sweep point into a CSV");
  add_common(sweep, true);
  sweep->add_option("--summary", summary_path, "JSON summary path (default: <csv stem>.summary.json)");
  sweep->add_option("--parallel", parallel, "sweep points run concurrently")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return remsamp_cli::cmd_validate(config_path, std::cout, std::cerr);

  remsamp_cli::ParseResult r = remsamp_cli::load_config(config_path);
  if (!r.ok()) {
    std::cerr << "invalid config " << config_path << ":\n";
    for (const auto& e : r.errors) std::cerr << "  - " << e << "\n";
    return 2;
  }
  remsamp_cli::ExperimentConfig& cfg = r.config;
  for (CLI::App* sub : {solve, solve_age, simulate, sweep}) {
    if (sub->parsed() && sub->count("--seed") > 0) cfg.sim.seed = seed;
  }

  if (solve->parsed()) return remsamp_cli::cmd_solve(cfg, out_path, std::cout, std::cerr);
  if (solve_age->parsed()) return remsamp_cli::cmd_solve_age(cfg, out_path, std::cout, std::cerr);
  if (simulate->parsed()) return remsamp_cli::cmd_simulate(cfg, out_path, std::cout, std::cerr, trace_path,
                                                           trace_every);
  return remsamp_cli::cmd_sweep(cfg, out_path, summary_path, parallel, std::cerr);
}
