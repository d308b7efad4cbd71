#pragma once

// Closed forms for one stage of a hitting-time policy started at estimation
// error w with threshold v: wait until |w + W_t| >= v, then transmit for Y.

#include "remsamp/channel.hpp"

namespace remsamp {

struct StageParams {
  double w;
  double v;
  double beta;
  double mean_y;
  double mean_y2;
};

/// Expected cost of one stage, integral of the squared error over the wait
/// and the transmission minus beta times the stage length:
///   1/2 E[Y^2] + E[Y] w^2 - E[Y] beta + max(v^4 - w^4, 0) / 6
///   - (beta - E[Y]) max(v^2 - w^2, 0).
double stage_cost(const StageParams& p);

/// E[tau] = max(v^2 - w^2, 0).
double expected_hitting_time(double w, double v);

/// E[ int_0^tau (w + W_t)^2 dt ] = max(v^4 - w^4, 0) / 6.
double expected_sq_integral(double w, double v);

/// Exit law of w + W_t from (-v, v).
struct ExitLaw {
  double p_plus;   // probability of leaving at +v
  double p_minus;  // probability of leaving at -v
};

/// Requires v > 0 and |w| <= v.
ExitLaw exit_distribution(double w, double v);

}  // namespace remsamp
