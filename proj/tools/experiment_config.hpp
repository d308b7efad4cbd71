#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "remsamp/remsamp.h"

namespace remsamp_cli {

struct DelaySpec {
  std::string kind = "constant";  // constant | twopoint | lognormal
  double c = 1.0;
  double y1 = 1.0;
  double p1 = 0.5;
  double y2 = 2.0;
  double sigma = 1.0;
};

struct SweepSpec {
  std::string parameter;  // alpha | sigma
  std::vector<double> values;
};

struct ExperimentConfig {
  double alpha = 0.0;
  DelaySpec delay;
  remsamp_solver_config solver{};
  remsamp_sim_config sim{};
  std::optional<SweepSpec> sweep;
  std::vector<std::string> policies{"optimal", "age", "zerowait"};
  std::string output = "results.csv";
  bool record_runtime = false;

  ExperimentConfig();

  bool wants(const std::string& policy) const;
};

struct ParseResult {
  ExperimentConfig config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

/// Schema and range checks; every violation is listed.
ParseResult parse_config(const nlohmann::json& doc);
ParseResult load_config(const std::string& path);

/// The effective configuration with all defaults filled in.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Channel for one sweep point (or the base channel when `value` is empty).
struct ChannelDeleter {
  void operator()(remsamp_channel* c) const { remsamp_channel_destroy(c); }
};
using ChannelPtr = std::unique_ptr<remsamp_channel, ChannelDeleter>;

/// Throws std::runtime_error with the library message on failure.
ChannelPtr make_channel(const ExperimentConfig& cfg, std::optional<double> sweep_value = {});

}  // namespace remsamp_cli
