#include "remsamp/remsamp.h"

#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "remsamp/sim.hpp"
#include "remsamp/solver.hpp"

struct remsamp_channel {
  remsamp::ChannelModel model;
};

struct remsamp_solution {
  remsamp::SolverResult result;
};

namespace {

thread_local std::string g_last_error;

remsamp_status fail(remsamp_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps library exceptions onto status codes.
template <class F>
remsamp_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return REMSAMP_OK;
  } catch (const remsamp::InvalidArgument& e) {
    return fail(REMSAMP_INVALID_ARGUMENT, e.what());
  } catch (const remsamp::NumericalError& e) {
    return fail(REMSAMP_NUMERICAL, e.what());
  } catch (const remsamp::ConvergenceError& e) {
    return fail(REMSAMP_NO_CONVERGENCE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(REMSAMP_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(REMSAMP_INTERNAL, e.what());
  } catch (...) {
    return fail(REMSAMP_INTERNAL, "unknown error");
  }
}

remsamp_status null_arg(const char* what) {
  return fail(REMSAMP_INVALID_ARGUMENT, std::string(what) + " must not be NULL");
}

remsamp::SolverConfig to_cpp(const remsamp_solver_config* c) {
  remsamp::SolverConfig s;
  if (c == nullptr) return s;
  s.k1 = c->k1;
  s.k2 = c->k2;
  s.eps1 = c->eps1;
  s.eps2 = c->eps2;
  s.rho = c->rho;
  s.grid_nodes = c->grid_nodes;
  s.wmax = c->wmax;
  s.gh_nodes = c->gh_nodes;
  s.truncation = c->truncation;
  s.max_expansions = c->max_expansions;
  s.max_inner_iterations = c->max_inner_iterations;
  return s;
}

remsamp::SimConfig to_cpp(const remsamp_sim_config* c) {
  remsamp::SimConfig s;
  if (c == nullptr) return s;
  s.dt = c->dt;
  s.horizon = c->horizon;
  s.replications = c->replications;
  s.seed = c->seed;
  s.warmup_fraction = c->warmup_fraction;
  s.threads = c->threads;
  return s;
}

remsamp::Policy to_cpp(remsamp_policy p) {
  switch (p.kind) {
    case REMSAMP_POLICY_SIGNAL_AWARE:
      return remsamp::Policy::signal_aware(p.param);
    case REMSAMP_POLICY_AGE_THRESHOLD:
      return remsamp::Policy::age_threshold(p.param);
    case REMSAMP_POLICY_ZERO_WAIT:
      return remsamp::Policy::zero_wait();
  }
  throw remsamp::InvalidArgument("unknown policy kind");
}

template <class Make>
remsamp_status create_channel(double alpha, remsamp_channel** out, Make&& make) {
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new remsamp_channel{remsamp::ChannelModel(alpha, make())}; });
}

}  // namespace

extern "C" {

const char* remsamp_last_error(void) { return g_last_error.c_str(); }

const char* remsamp_status_name(remsamp_status status) {
  switch (status) {
    case REMSAMP_OK:
      return "ok";
    case REMSAMP_INVALID_ARGUMENT:
      return "invalid argument";
    case REMSAMP_NO_CONVERGENCE:
      return "no convergence";
    case REMSAMP_NUMERICAL:
      return "numerical error";
    case REMSAMP_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* remsamp_version(void) { return "1.0.0"; }

remsamp_status remsamp_channel_create_constant(double alpha, double c, remsamp_channel** out) {
  return create_channel(alpha, out, [&] { return remsamp::DelayModel::constant(c); });
}

remsamp_status remsamp_channel_create_twopoint(double alpha, double y1, double p1, double y2,
                                               remsamp_channel** out) {
  return create_channel(alpha, out, [&] { return remsamp::DelayModel::two_point(y1, p1, y2); });
}

remsamp_status remsamp_channel_create_lognormal(double alpha, double sigma,
                                                remsamp_channel** out) {
  return create_channel(alpha, out, [&] { return remsamp::DelayModel::lognormal(sigma); });
}

void remsamp_channel_destroy(remsamp_channel* channel) { delete channel; }

remsamp_status remsamp_channel_moments(const remsamp_channel* channel, double* mean_y,
                                       double* mean_y2) {
  if (channel == nullptr) return null_arg("channel");
  const remsamp::Moments m = channel->model.moments();
  if (mean_y != nullptr) *mean_y = m.mean;
  if (mean_y2 != nullptr) *mean_y2 = m.second;
  return REMSAMP_OK;
}

double remsamp_channel_alpha(const remsamp_channel* channel) {
  return channel == nullptr ? std::numeric_limits<double>::quiet_NaN() : channel->model.alpha();
}

void remsamp_solver_config_default(remsamp_solver_config* cfg) {
  if (cfg == nullptr) return;
  const remsamp::SolverConfig s;
  *cfg = {s.k1,       s.k2,         s.eps1,           s.eps2,
          s.rho,      s.grid_nodes, s.wmax,           s.gh_nodes,
          s.truncation, s.max_expansions, s.max_inner_iterations};
}

remsamp_status remsamp_solve_mse_opt(const remsamp_channel* channel,
                                     const remsamp_solver_config* cfg, remsamp_solution** out) {
  if (channel == nullptr) return null_arg("channel");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new remsamp_solution{remsamp::solve_mse_opt(channel->model, to_cpp(cfg))};
  });
}

remsamp_status remsamp_reliable_closed_form(const remsamp_channel* channel,
                                            remsamp_solution** out) {
  if (channel == nullptr) return null_arg("channel");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new remsamp_solution{remsamp::reliable_closed_form(channel->model.delay())};
  });
}

void remsamp_solution_destroy(remsamp_solution* solution) { delete solution; }

double remsamp_solution_mse_opt(const remsamp_solution* s) {
  return s == nullptr ? std::numeric_limits<double>::quiet_NaN() : s->result.mse_opt;
}

double remsamp_solution_threshold(const remsamp_solution* s) {
  return s == nullptr ? std::numeric_limits<double>::quiet_NaN() : s->result.v;
}

int remsamp_solution_outer_iterations(const remsamp_solution* s) {
  return s == nullptr ? 0 : s->result.outer_iters;
}

int remsamp_solution_inner_iterations(const remsamp_solution* s) {
  return s == nullptr ? 0 : s->result.inner_iterations;
}

double remsamp_solution_wmax(const remsamp_solution* s) {
  return s == nullptr ? std::numeric_limits<double>::quiet_NaN() : s->result.wmax;
}

size_t remsamp_solution_v_history(const remsamp_solution* s, double* buf, size_t cap) {
  if (s == nullptr) return 0;
  const auto& h = s->result.v_history;
  for (size_t i = 0; i < h.size() && i < cap && buf != nullptr; ++i) buf[i] = h[i];
  return h.size();
}

size_t remsamp_solution_h_count(const remsamp_solution* s) {
  return s == nullptr ? 0 : s->result.h_values.size();
}

remsamp_status remsamp_solution_h_at(const remsamp_solution* s, size_t i, double* beta,
                                     double* h, int* feasible) {
  if (s == nullptr) return null_arg("solution");
  if (i >= s->result.h_values.size()) {
    return fail(REMSAMP_INVALID_ARGUMENT, "h trace index out of range");
  }
  const remsamp::HSample& hs = s->result.h_values[i];
  if (beta != nullptr) *beta = hs.beta;
  if (h != nullptr) *h = hs.h;
  if (feasible != nullptr) *feasible = hs.feasible ? 1 : 0;
  return REMSAMP_OK;
}

remsamp_status remsamp_solve_age_opt(const remsamp_channel* channel, remsamp_age_result* out) {
  if (channel == nullptr) return null_arg("channel");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const remsamp::AgeResult a = remsamp::solve_age_opt(channel->model);
    *out = {a.age_opt, a.threshold, a.is_zero_wait ? 1 : 0};
  });
}

remsamp_status remsamp_h_of_beta(const remsamp_channel* channel, const remsamp_solver_config* cfg,
                                 double beta, double* out) {
  if (channel == nullptr) return null_arg("channel");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { *out = remsamp::h_of_beta(beta, channel->model, to_cpp(cfg)); });
}

void remsamp_sim_config_default(remsamp_sim_config* cfg) {
  if (cfg == nullptr) return;
  const remsamp::SimConfig s;
  *cfg = {s.dt, s.horizon, s.replications, s.seed, s.warmup_fraction, s.threads};
}

remsamp_status remsamp_simulate(const remsamp_channel* channel, remsamp_policy policy,
                                const remsamp_sim_config* cfg, remsamp_sim_result* out) {
  if (channel == nullptr) return null_arg("channel");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const remsamp::SimResult r =
        remsamp::run_experiment(to_cpp(policy), channel->model, to_cpp(cfg));
    *out = {r.avg_mse,
            r.avg_age,
            r.sampling_rate,
            r.successful_rate,
            r.ci_halfwidth_mse,
            r.ci_halfwidth_age,
            r.ci_halfwidth_sampling_rate,
            r.ci_halfwidth_successful_rate,
            r.epochs_observed,
            r.dt,
            static_cast<int>(r.warnings.size())};
  });
}

remsamp_status remsamp_sim_config_check(const remsamp_channel* channel,
                                        const remsamp_sim_config* cfg, int* warnings) {
  if (channel == nullptr) return null_arg("channel");
  std::vector<std::string> w;
  const remsamp_status s = guarded([&] { w = to_cpp(cfg).validate(channel->model); });
  if (s != REMSAMP_OK) return s;
  std::string joined;
  for (const auto& msg : w) joined += (joined.empty() ? "" : "\n") + msg;
  g_last_error = joined;
  if (warnings != nullptr) *warnings = static_cast<int>(w.size());
  return REMSAMP_OK;
}

remsamp_status remsamp_simulate_trace(const remsamp_channel* channel, remsamp_policy policy,
                                      const remsamp_sim_config* cfg, uint64_t replication,
                                      double every, remsamp_trace_fn fn, void* user) {
  if (channel == nullptr) return null_arg("channel");
  if (fn == nullptr) return null_arg("fn");
  if (!(every >= 0.0)) return fail(REMSAMP_INVALID_ARGUMENT, "trace interval must be >= 0");
  return guarded([&] {
    const remsamp::SimConfig sc = to_cpp(cfg);
    remsamp::Rng rng(remsamp::derive_seed(sc.seed, replication));
    remsamp::run_replication(
        to_cpp(policy), channel->model, sc, rng,
        [&](const remsamp::TracePoint& p) { fn(p.t, p.w, p.w_hat, p.age, user); }, every);
  });
}

uint64_t remsamp_derive_seed(uint64_t seed, uint64_t stream) {
  return remsamp::derive_seed(seed, stream);
}

}  // extern "C"
