#pragma once

// Outer layer: bisection on beta for the signal-aware optimum, the
// closed-form optimum of the reliable channel, and the age-optimal policy.

#include <limits>
#include <vector>

#include "remsamp/channel.hpp"
#include "remsamp/valueiter.hpp"

namespace remsamp {

struct SolverConfig {
  static constexpr double kAuto = std::numeric_limits<double>::quiet_NaN();

  double k1 = kAuto;  // NaN: E[Y] + eps2
  double k2 = kAuto;  // NaN: age_opt
  double eps1 = 1e-8;
  double eps2 = 1e-6;
  double rho = kAuto;  // NaN: (1 + alpha) / 2
  std::size_t grid_nodes = Discretization::kDefaultNodes;
  double wmax = kAuto;  // NaN: from the upper bracket
  int gh_nodes = WyIntegrator::kDefaultGhNodes;
  double truncation = WyIntegrator::kDefaultTruncation;
  int max_expansions = 60;
  int max_inner_iterations = 10000;

  /// Throws InvalidArgument on out-of-range settings.
  void validate(double alpha) const;
  IterationConfig iteration() const;
};

/// One evaluation of h(beta) = E[J(W_Y, beta)].
struct HSample {
  double beta;
  double h;
  double v;               // NaN when infeasible
  bool feasible;          // false when the threshold root does not exist
  int inner_iterations;
};

struct SolverResult {
  double mse_opt = 0.0;
  double v = 0.0;
  std::vector<double> v_history;
  int outer_iters = 0;
  std::vector<HSample> h_values;  // in probe order
  int inner_iterations = 0;       // at mse_opt
  double k1 = 0.0;                // final bracket
  double k2 = 0.0;
  double wmax = 0.0;
};

struct AgeResult {
  double age_opt;
  double threshold;  // age_opt - E[Y]/(1 - alpha)
  bool is_zero_wait;
};

/// E[J(W_Y, beta)] for a converged iterate.
double epoch_value(const IterState& state, const Discretization& disc);

/// Converged value iteration followed by epoch_value. A missing threshold
/// root is reported as feasible = false with h = +inf.
HSample h_sample(double beta, const SolverConfig& cfg, const Discretization& disc);

/// Same, building a grid wide enough for beta.
double h_of_beta(double beta, const ChannelModel& channel, const SolverConfig& cfg);

SolverResult solve_mse_opt(const ChannelModel& channel, const SolverConfig& cfg = {});

/// Reliable-channel optimum: v = sqrt(3 (beta - E[Y])) and beta the root of
/// E[g(W_Y, v, beta)] = 0, using truncated-normal moments per delay node.
/// Ignores alpha.
SolverResult reliable_closed_form(const DelayModel& delay, const SolverConfig& cfg = {});

/// E[g(W_Y, sqrt(3 (beta - E[Y])), beta)] in closed form per delay node.
double reliable_root_function(const DelayModel& delay, double beta);

/// F(beta) of the age-optimal root equation.
double age_root_function(const ChannelModel& channel, double beta);

AgeResult solve_age_opt(const ChannelModel& channel, const SolverConfig& cfg = {});

/// Grid half-width used when cfg.wmax is automatic.
double auto_wmax(const ChannelModel& channel, const SolverConfig& cfg, double beta_max);

}  // namespace remsamp
