#include "experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace remsamp_cli {

using nlohmann::json;

namespace {

const std::set<std::string> kPolicies{"optimal", "age", "zerowait"};

// Reads fields from one JSON object, recording type errors and unknown keys.
class Reader {
 public:
  Reader(const json& obj, std::string where, std::vector<std::string>& errors)
      : obj_(obj), where_(std::move(where)), errors_(errors) {
    if (!obj_.is_object()) errors_.push_back(where_ + ": must be an object");
  }

  ~Reader() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) errors_.push_back(where_ + ": unknown key \"" + key + "\"");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key);
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else {
      errors_.push_back(path(key) + ": must be a number");
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    // Non-negative integer literals parse as unsigned.
    const bool fits = std::is_unsigned_v<Int> ? v.is_number_unsigned() : v.is_number_integer();
    if (fits) {
      out = v.get<Int>();
    } else {
      errors_.push_back(path(key) + ": must be an integer" +
                        (std::is_unsigned_v<Int> ? " >= 0" : ""));
    }
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_string()) {
      out = v.get<std::string>();
    } else {
      errors_.push_back(path(key) + ": must be a string");
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_boolean()) {
      out = v.get<bool>();
    } else {
      errors_.push_back(path(key) + ": must be true or false");
    }
  }

  const json& at(const std::string& key) const { return obj_.at(key); }
  std::string path(const std::string& key) const { return where_ + "." + key; }

 private:
  const json& obj_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void check_alpha(double a, const std::string& where, std::vector<std::string>& errors) {
  if (!(a >= 0.0 && a < 1.0)) {
    std::ostringstream os;
    os << where << " = " << a << ": alpha must lie in [0, 1)";
    errors.push_back(os.str());
  }
}

void check_positive(double x, const std::string& where, std::vector<std::string>& errors) {
  if (!(x > 0.0) || !std::isfinite(x)) errors.push_back(where + ": must be positive");
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

ExperimentConfig::ExperimentConfig() {
  remsamp_solver_config_default(&solver);
  remsamp_sim_config_default(&sim);
}

bool ExperimentConfig::wants(const std::string& policy) const {
  for (const auto& p : policies) {
    if (p == policy) return true;
  }
  return false;
}

ParseResult parse_config(const json& doc) {
  ParseResult r;
  ExperimentConfig& c = r.config;
  auto& errors = r.errors;
  {
    Reader top(doc, "config", errors);
    if (!top.has("channel")) {
      errors.push_back("config.channel: missing");
    } else {
      Reader ch(top.at("channel"), "channel", errors);
      if (!ch.has("alpha")) errors.push_back("channel.alpha: missing");
      ch.number("alpha", c.alpha);
      check_alpha(c.alpha, "channel.alpha", errors);
      if (!ch.has("delay")) {
        errors.push_back("channel.delay: missing");
      } else {
        Reader d(ch.at("delay"), "channel.delay", errors);
        d.string("kind", c.delay.kind);
        if (c.delay.kind == "constant") {
          if (!d.has("c")) errors.push_back("channel.delay.c: missing");
          d.number("c", c.delay.c);
          check_positive(c.delay.c, "channel.delay.c", errors);
        } else if (c.delay.kind == "twopoint") {
          for (const char* k : {"y1", "p1", "y2"}) {
            if (!d.has(k)) errors.push_back(d.path(k) + ": missing");
          }
          d.number("y1", c.delay.y1);
          d.number("p1", c.delay.p1);
          d.number("y2", c.delay.y2);
          check_positive(c.delay.y1, "channel.delay.y1", errors);
          check_positive(c.delay.y2, "channel.delay.y2", errors);
          if (!(c.delay.p1 > 0.0 && c.delay.p1 < 1.0)) {
            errors.push_back("channel.delay.p1: must lie in (0, 1)");
          }
        } else if (c.delay.kind == "lognormal") {
          if (!d.has("sigma")) errors.push_back("channel.delay.sigma: missing");
          d.number("sigma", c.delay.sigma);
          if (!(c.delay.sigma >= 0.0) || !std::isfinite(c.delay.sigma)) {
            errors.push_back("channel.delay.sigma: must be non-negative");
          }
        } else {
          errors.push_back("channel.delay.kind: must be constant, twopoint or lognormal");
        }
      }
    }

    if (top.has("solver")) {
      Reader s(top.at("solver"), "solver", errors);
      s.number("k1", c.solver.k1);
      s.number("k2", c.solver.k2);
      s.number("eps1", c.solver.eps1);
      s.number("eps2", c.solver.eps2);
      s.number("rho", c.solver.rho);
      s.integer("grid_nodes", c.solver.grid_nodes);
      s.number("wmax", c.solver.wmax);
      s.integer("gh_nodes", c.solver.gh_nodes);
      s.number("truncation", c.solver.truncation);
      s.integer("max_expansions", c.solver.max_expansions);
      s.integer("max_inner_iterations", c.solver.max_inner_iterations);
    }
    const remsamp_solver_config& s = c.solver;
    if (!(s.eps1 > 0.0)) errors.push_back("solver.eps1: must be positive");
    if (!(s.eps2 > 0.0)) errors.push_back("solver.eps2: must be positive");
    if (!std::isnan(s.k1) && !std::isnan(s.k2) && !(s.k1 < s.k2)) {
      errors.push_back("solver: k1 must be below k2");
    }
    if (!std::isnan(s.rho) && !(s.rho > c.alpha && s.rho < 1.0)) {
      errors.push_back("solver.rho: must lie in (alpha, 1)");
    }
    if (!std::isnan(s.wmax) && !(s.wmax > 0.0)) errors.push_back("solver.wmax: must be positive");
    if (s.grid_nodes < 9 || s.grid_nodes % 2 == 0) {
      errors.push_back("solver.grid_nodes: must be odd and at least 9");
    }
    if (s.gh_nodes < 2) errors.push_back("solver.gh_nodes: must be at least 2");
    if (!(s.truncation > 0.0)) errors.push_back("solver.truncation: must be positive");
    if (s.max_expansions < 0) errors.push_back("solver.max_expansions: must be >= 0");
    if (s.max_inner_iterations < 1) errors.push_back("solver.max_inner_iterations: must be >= 1");

    if (top.has("sim")) {
      Reader m(top.at("sim"), "sim", errors);
      m.number("dt", c.sim.dt);
      m.number("horizon", c.sim.horizon);
      m.integer("replications", c.sim.replications);
      m.integer("seed", c.sim.seed);
      m.number("warmup_fraction", c.sim.warmup_fraction);
      m.integer("threads", c.sim.threads);
    }
    if (!std::isnan(c.sim.dt) && !(c.sim.dt > 0.0)) errors.push_back("sim.dt: must be positive");
    if (!(c.sim.horizon > 0.0)) errors.push_back("sim.horizon: must be positive");
    if (c.sim.replications < 2) errors.push_back("sim.replications: must be at least 2");
    if (!(c.sim.warmup_fraction >= 0.0 && c.sim.warmup_fraction < 1.0)) {
      errors.push_back("sim.warmup_fraction: must lie in [0, 1)");
    }
    if (c.sim.threads < 1) errors.push_back("sim.threads: must be at least 1");

    if (top.has("sweep")) {
      Reader w(top.at("sweep"), "sweep", errors);
      SweepSpec sw;
      if (!w.has("parameter")) errors.push_back("sweep.parameter: missing");
      w.string("parameter", sw.parameter);
      if (!w.has("values")) {
        errors.push_back("sweep.values: missing");
      } else if (!w.at("values").is_array() || w.at("values").empty()) {
        errors.push_back("sweep.values: must be a non-empty array of numbers");
      } else {
        for (const auto& v : w.at("values")) {
          if (!v.is_number()) {
            errors.push_back("sweep.values: must be a non-empty array of numbers");
            break;
          }
          sw.values.push_back(v.get<double>());
        }
      }
      if (sw.parameter == "alpha") {
        for (double a : sw.values) check_alpha(a, "sweep value", errors);
      } else if (sw.parameter == "sigma") {
        if (c.delay.kind != "lognormal") {
          errors.push_back("sweep.parameter: sigma sweeps need a lognormal delay");
        }
        for (double s : sw.values) {
          if (!(s >= 0.0) || !std::isfinite(s)) {
            errors.push_back("sweep value " + std::to_string(s) + ": sigma must be >= 0");
          }
        }
      } else if (w.has("parameter")) {
        errors.push_back("sweep.parameter: must be alpha or sigma");
      }
      c.sweep = sw;
    }

    if (top.has("policies")) {
      c.policies.clear();
      const json& p = top.at("policies");
      if (!p.is_array()) {
        errors.push_back("policies: must be an array");
      } else {
        std::set<std::string> seen;
        for (const auto& v : p) {
          if (!v.is_string() || !kPolicies.count(v.get<std::string>())) {
            errors.push_back("policies: entries must be \"optimal\", \"age\" or \"zerowait\"");
            continue;
          }
          if (!seen.insert(v.get<std::string>()).second) {
            errors.push_back("policies: duplicate entry \"" + v.get<std::string>() + "\"");
            continue;
          }
          c.policies.push_back(v.get<std::string>());
        }
      }
      if (c.policies.empty()) errors.push_back("policies: at least one policy is required");
    }
    top.string("output", c.output);
    top.boolean("record_runtime", c.record_runtime);
  }

  // Simulator checks that depend on the whole channel (dt against a
  // constant delay, horizon warnings) are delegated to the library.
  if (r.ok()) {
    try {
      std::vector<std::optional<double>> points{std::nullopt};
      if (c.sweep) points.assign(c.sweep->values.begin(), c.sweep->values.end());
      for (const auto& pt : points) {
        ChannelPtr ch = make_channel(c, pt);
        if (remsamp_sim_config_check(ch.get(), &c.sim, nullptr) != REMSAMP_OK) {
          errors.push_back(std::string("sim: ") + remsamp_last_error());
          break;
        }
      }
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }
  return r;
}

ParseResult load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back("cannot read config file " + path);
    return r;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    ParseResult r;
    r.errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return r;
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json delay{{"kind", c.delay.kind}};
  if (c.delay.kind == "constant") {
    delay["c"] = c.delay.c;
  } else if (c.delay.kind == "twopoint") {
    delay["y1"] = c.delay.y1;
    delay["p1"] = c.delay.p1;
    delay["y2"] = c.delay.y2;
  } else {
    delay["sigma"] = c.delay.sigma;
  }
  const remsamp_solver_config& s = c.solver;
  json j{
      {"channel", {{"alpha", c.alpha}, {"delay", delay}}},
      {"solver",
       {{"k1", number_or_null(s.k1)},
        {"k2", number_or_null(s.k2)},
        {"eps1", s.eps1},
        {"eps2", s.eps2},
        {"rho", number_or_null(s.rho)},
        {"grid_nodes", s.grid_nodes},
        {"wmax", number_or_null(s.wmax)},
        {"gh_nodes", s.gh_nodes},
        {"truncation", s.truncation},
        {"max_expansions", s.max_expansions},
        {"max_inner_iterations", s.max_inner_iterations}}},
      {"sim",
       {{"dt", number_or_null(c.sim.dt)},
        {"horizon", c.sim.horizon},
        {"replications", c.sim.replications},
        {"seed", c.sim.seed},
        {"warmup_fraction", c.sim.warmup_fraction},
        {"threads", c.sim.threads}}},
      {"policies", c.policies},
      {"output", c.output},
      {"record_runtime", c.record_runtime},
  };
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  return j;
}

ChannelPtr make_channel(const ExperimentConfig& cfg, std::optional<double> sweep_value) {
  double alpha = cfg.alpha;
  DelaySpec d = cfg.delay;
  if (sweep_value && cfg.sweep) {
    if (cfg.sweep->parameter == "alpha") alpha = *sweep_value;
    if (cfg.sweep->parameter == "sigma") d.sigma = *sweep_value;
  }
  remsamp_channel* ch = nullptr;
  remsamp_status st = REMSAMP_INVALID_ARGUMENT;
  if (d.kind == "constant") {
    st = remsamp_channel_create_constant(alpha, d.c, &ch);
  } else if (d.kind == "twopoint") {
    st = remsamp_channel_create_twopoint(alpha, d.y1, d.p1, d.y2, &ch);
  } else if (d.kind == "lognormal") {
    st = remsamp_channel_create_lognormal(alpha, d.sigma, &ch);
  }
  if (st != REMSAMP_OK) {
    throw std::runtime_error(std::string("channel: ") + remsamp_last_error());
  }
  return ChannelPtr(ch);
}

}  // namespace remsamp_cli
