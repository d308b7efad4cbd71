#include "runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace remsamp_cli {

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

void check(remsamp_status st, const std::string& what) {
  if (st != REMSAMP_OK) {
    throw std::runtime_error(what + ": " + remsamp_status_name(st) + ": " + remsamp_last_error());
  }
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string point_label(const ExperimentConfig& cfg, std::size_t index,
                        std::optional<double> value) {
  std::string s = "sweep point " + std::to_string(index);
  if (value && cfg.sweep) s += " (" + cfg.sweep->parameter + "=" + format_number(*value) + ")";
  return s;
}

json sim_json(const remsamp_sim_result& r) {
  return {{"avg_mse", r.avg_mse},
          {"ci_mse", r.ci_mse},
          {"avg_age", r.avg_age},
          {"ci_age", r.ci_age},
          {"sampling_rate", r.sampling_rate},
          {"ci_sampling_rate", r.ci_sampling_rate},
          {"successful_rate", r.successful_rate},
          {"ci_successful_rate", r.ci_successful_rate},
          {"epochs_observed", r.epochs_observed},
          {"dt", r.dt}};
}

bool write_json(const json& j, const std::string& path, std::ostream& out, std::ostream& err) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

std::string summary_path_for(const std::string& csv) {
  const auto dot = csv.find_last_of('.');
  const auto slash = csv.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return csv.substr(0, dot) + ".summary.json";
  }
  return csv + ".summary.json";
}

}  // namespace

std::uint64_t point_seed(std::uint64_t base, std::size_t index) {
  return remsamp_derive_seed(base, index);
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "sweep_param",      "sweep_value", "mse_opt",          "v_opt",      "age_opt",
      "age_threshold",    "sim_mse_optimal", "sim_mse_age",  "sim_mse_zerowait",
      "ci_optimal",       "ci_age",      "ci_zerowait",      "runtime_s"};
  return cols;
}

std::string csv_header() {
  std::string s;
  for (const auto& c : csv_columns()) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

std::string csv_row(const PointResult& p, bool record_runtime) {
  auto num = [](double x) { return format_number(x); };
  auto sim = [&](const char* policy, bool ci) -> std::string {
    auto it = p.sims.find(policy);
    if (it == p.sims.end()) return "";
    return num(ci ? it->second.ci_mse : it->second.avg_mse);
  };
  std::vector<std::string> f{
      p.sweep_param,
      p.sweep_value ? num(*p.sweep_value) : "",
      p.solved ? num(p.mse_opt) : "",
      p.solved ? num(p.v_opt) : "",
      num(p.age.age_opt),
      num(p.age.threshold),
      sim("optimal", false),
      sim("age", false),
      sim("zerowait", false),
      sim("optimal", true),
      sim("age", true),
      sim("zerowait", true),
      record_runtime ? num(p.runtime_s) : "",
  };
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + f[i];
  return s + "\n";
}

PointResult run_point(const ExperimentConfig& cfg, std::size_t index,
                      std::optional<double> sweep_value, bool simulate) {
  const auto t0 = std::chrono::steady_clock::now();
  PointResult p;
  p.index = index;
  if (cfg.sweep) p.sweep_param = cfg.sweep->parameter;
  p.sweep_value = sweep_value;

  ChannelPtr ch = make_channel(cfg, sweep_value);
  check(remsamp_solve_age_opt(ch.get(), &p.age), "age-optimal solver");

  if (cfg.wants("optimal")) {
    remsamp_solution* raw = nullptr;
    check(remsamp_solve_mse_opt(ch.get(), &cfg.solver, &raw), "threshold solver");
    std::unique_ptr<remsamp_solution, void (*)(remsamp_solution*)> sol(raw,
                                                                       remsamp_solution_destroy);
    p.solved = true;
    p.mse_opt = remsamp_solution_mse_opt(sol.get());
    p.v_opt = remsamp_solution_threshold(sol.get());
    p.outer_iterations = remsamp_solution_outer_iterations(sol.get());
    p.inner_iterations = remsamp_solution_inner_iterations(sol.get());
    p.wmax = remsamp_solution_wmax(sol.get());
    p.v_history.resize(remsamp_solution_v_history(sol.get(), nullptr, 0));
    remsamp_solution_v_history(sol.get(), p.v_history.data(), p.v_history.size());
    for (std::size_t i = 0; i < remsamp_solution_h_count(sol.get()); ++i) {
      HProbe h{};
      int feasible = 0;
      remsamp_solution_h_at(sol.get(), i, &h.beta, &h.h, &feasible);
      h.feasible = feasible != 0;
      p.h_trace.push_back(h);
    }
  }

  if (simulate) {
    for (const auto& name : cfg.policies) {
      remsamp_policy pol{REMSAMP_POLICY_ZERO_WAIT, 0.0};
      if (name == "optimal") pol = {REMSAMP_POLICY_SIGNAL_AWARE, p.v_opt};
      if (name == "age") pol = {REMSAMP_POLICY_AGE_THRESHOLD, std::max(0.0, p.age.threshold)};
      remsamp_sim_config sc = cfg.sim;
      sc.seed = point_seed(cfg.sim.seed, index);
      remsamp_sim_result r{};
      check(remsamp_simulate(ch.get(), pol, &sc, &r), "simulation of policy " + name);
      p.sims[name] = r;
    }
  }
  p.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return p;
}

json solver_json(const PointResult& p) {
  json j{{"age_opt", p.age.age_opt},
         {"age_threshold", p.age.threshold},
         {"age_is_zero_wait", p.age.is_zero_wait != 0}};
  if (p.solved) {
    j["mse_opt"] = p.mse_opt;
    j["v"] = p.v_opt;
    j["iterations"] = {{"outer", p.outer_iterations}, {"inner", p.inner_iterations}};
    j["wmax"] = p.wmax;
    j["v_history"] = p.v_history;
    json trace = json::array();
    for (const auto& h : p.h_trace) {
      trace.push_back({{"beta", h.beta}, {"h", number_or_null(h.h)}, {"feasible", h.feasible}});
    }
    j["h_trace"] = trace;
  }
  return j;
}

json point_json(const PointResult& p) {
  json j{{"index", p.index}, {"solver", solver_json(p)}};
  if (!p.sweep_param.empty()) j["sweep_param"] = p.sweep_param;
  if (p.sweep_value) j["sweep_value"] = *p.sweep_value;
  json sims = json::object();
  for (const auto& [name, r] : p.sims) sims[name] = sim_json(r);
  j["sim"] = sims;
  return j;
}

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
  const ParseResult r = load_config(config_path);
  if (!r.ok()) {
    err << "invalid config " << config_path << ":\n";
    for (const auto& e : r.errors) err << "  - " << e << "\n";
    return kExitConfig;
  }
  ChannelPtr ch = make_channel(r.config);
  int warnings = 0;
  remsamp_sim_config_check(ch.get(), &r.config.sim, &warnings);
  out << "config ok\n";
  if (warnings > 0) out << "warnings:\n  - " << remsamp_last_error() << "\n";
  out << "effective configuration:\n" << to_json(r.config).dump(2) << "\n";
  return kExitOk;
}

int cmd_solve(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  ExperimentConfig c = cfg;
  if (!c.wants("optimal")) c.policies.push_back("optimal");
  try {
    const PointResult p = run_point(c, 0, std::nullopt, false);
    return write_json(solver_json(p), out_path, out, err) ? kExitOk : kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRun;
  }
}

int cmd_solve_age(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& out,
                  std::ostream& err) {
  try {
    ChannelPtr ch = make_channel(cfg);
    remsamp_age_result a{};
    check(remsamp_solve_age_opt(ch.get(), &a), "age-optimal solver");
    const json j{{"age_opt", a.age_opt},
                 {"age_threshold", a.threshold},
                 {"age_is_zero_wait", a.is_zero_wait != 0}};
    return write_json(j, out_path, out, err) ? kExitOk : kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRun;
  }
}

namespace {

struct TraceWriter {
  std::ofstream* out;
  std::string policy;
};

void trace_row(double t, double w, double w_hat, double age, void* user) {
  auto* tw = static_cast<TraceWriter*>(user);
  *tw->out << tw->policy << ',' << format_number(t) << ',' << format_number(w) << ','
           << format_number(w_hat) << ',' << format_number(age) << '\n';
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& out,
                 std::ostream& err, const std::string& trace_path, double trace_every) {
  try {
    const PointResult p = run_point(cfg, 0, std::nullopt, true);
    if (!trace_path.empty()) {
      std::ofstream f(trace_path, std::ios::binary);
      if (!f) {
        err << "error: cannot write " << trace_path << "\n";
        return kExitIo;
      }
      f << "policy,t,W,What,age\n";
      ChannelPtr ch = make_channel(cfg);
      for (const auto& name : cfg.policies) {
        remsamp_policy pol{REMSAMP_POLICY_ZERO_WAIT, 0.0};
        if (name == "optimal") pol = {REMSAMP_POLICY_SIGNAL_AWARE, p.v_opt};
        if (name == "age") pol = {REMSAMP_POLICY_AGE_THRESHOLD, std::max(0.0, p.age.threshold)};
        remsamp_sim_config sc = cfg.sim;
        sc.seed = point_seed(cfg.sim.seed, 0);
        TraceWriter tw{&f, name};
        check(remsamp_simulate_trace(ch.get(), pol, &sc, 0, trace_every, trace_row, &tw),
              "trace of policy " + name);
      }
    }
    return write_json(point_json(p), out_path, out, err) ? kExitOk : kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRun;
  }
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& csv_path,
              const std::string& summary_path, int parallel, std::ostream& err) {
  const std::string csv = csv_path.empty() ? cfg.output : csv_path;
  const std::string summary = summary_path.empty() ? summary_path_for(csv) : summary_path;
  std::ofstream f(csv, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << csv << "\n";
    return kExitIo;
  }
  f << csv_header() << std::flush;

  std::vector<std::optional<double>> points{std::nullopt};
  if (cfg.sweep) points.assign(cfg.sweep->values.begin(), cfg.sweep->values.end());
  const std::size_t n = points.size();

  // Points may finish out of order; rows are written as soon as every
  // earlier row is done, so a failure leaves the completed prefix on disk.
  std::vector<std::optional<PointResult>> done(n);
  std::size_t written = 0;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;

  auto worker = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        PointResult p = run_point(cfg, i, points[i]);
        std::lock_guard<std::mutex> lock(mu);
        done[i] = std::move(p);
        while (written < n && done[written]) {
          f << csv_row(*done[written], cfg.record_runtime) << std::flush;
          ++written;
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failed) failure = point_label(cfg, i, points[i]) + ": " + e.what();
        failed = true;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(parallel, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  f.close();

  if (failed) {
    err << "error: " << failure << "\n";
    err << "kept " << written << " completed row(s) in " << csv << "\n";
    return kExitRun;
  }

  json s{{"config", to_json(cfg)}, {"columns", csv_columns()}};
  json pts = json::array();
  for (const auto& p : done) {
    json pj = point_json(*p);
    if (cfg.record_runtime) pj["runtime_s"] = p->runtime_s;
    pts.push_back(pj);
  }
  s["points"] = pts;
  std::ostringstream unused;
  return write_json(s, summary, unused, err) ? kExitOk : kExitIo;
}

}  // namespace remsamp_cli
