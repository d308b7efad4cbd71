#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiment_config.hpp"

namespace remsamp_cli {

struct HProbe {
  double beta;
  double h;
  bool feasible;
};

struct PointResult {
  std::size_t index = 0;
  std::string sweep_param;
  std::optional<double> sweep_value;

  bool solved = false;  // mse_opt is only computed when "optimal" is requested
  double mse_opt = 0.0;
  double v_opt = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double wmax = 0.0;
  std::vector<double> v_history;
  std::vector<HProbe> h_trace;

  remsamp_age_result age{};
  std::map<std::string, remsamp_sim_result> sims;
  double runtime_s = 0.0;
};

/// Simulation seed of one sweep point. Every policy at the point uses it, so
/// policies are compared on common random numbers.
std::uint64_t point_seed(std::uint64_t base, std::size_t index);

/// Solves and simulates one sweep point. Throws std::runtime_error.
PointResult run_point(const ExperimentConfig& cfg, std::size_t index,
                      std::optional<double> sweep_value, bool simulate = true);

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const PointResult& p, bool record_runtime);
/// 12 significant digits, shortest form.
std::string format_number(double x);

nlohmann::json solver_json(const PointResult& p);
nlohmann::json point_json(const PointResult& p);

/// Subcommands; return the process exit status.
int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_solve(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& out,
              std::ostream& err);
int cmd_solve_age(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& out,
                  std::ostream& err);
/// With a trace path, replication 0 of every policy is also dumped as CSV
/// rows policy,t,W,What,age spaced at least `trace_every` apart.
int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& out,
                 std::ostream& err, const std::string& trace_path = {}, double trace_every = 1.0);
int cmd_sweep(const ExperimentConfig& cfg, const std::string& csv_path,
              const std::string& summary_path, int parallel, std::ostream& err);

}  // namespace remsamp_cli
