#pragma once

// Monte Carlo simulation of the sampler, the unreliable channel and the
// MMSE estimator (the last successfully delivered sample).

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "remsamp/channel.hpp"

namespace remsamp {

struct Policy {
  enum class Kind { SignalAwareThreshold, AgeThreshold, ZeroWait };

  Kind kind = Kind::ZeroWait;
  double param = 0.0;  // v or the age threshold; unused for ZeroWait

  static Policy signal_aware(double v) { return {Kind::SignalAwareThreshold, v}; }
  static Policy age_threshold(double a) { return {Kind::AgeThreshold, a}; }
  static Policy zero_wait() { return {Kind::ZeroWait, 0.0}; }

  void validate() const;
  std::string describe() const;
};

struct SimConfig {
  double dt = std::numeric_limits<double>::quiet_NaN();  // NaN: 1e-3 E[Y]
  double horizon = 1e6;
  int replications = 20;
  std::uint64_t seed = 1;
  double warmup_fraction = 0.1;
  int threads = 1;

  double effective_dt(const ChannelModel& channel) const;
  /// Throws InvalidArgument; returns soft warnings.
  std::vector<std::string> validate(const ChannelModel& channel) const;
};

struct TracePoint {
  double t;
  double w;
  double w_hat;
  double age;
};
using TraceSink = std::function<void(const TracePoint&)>;

struct ReplicationResult {
  double avg_mse = 0.0;
  double avg_age = 0.0;
  double sampling_rate = 0.0;
  double successful_rate = 0.0;
  long long samples = 0;
  long long deliveries = 0;  // successful ones, i.e. completed epochs
  double measured_time = 0.0;
  double total_time = 0.0;
};

struct SimResult {
  double avg_mse = 0.0;
  double avg_age = 0.0;
  double sampling_rate = 0.0;
  double successful_rate = 0.0;
  double ci_halfwidth_mse = 0.0;
  double ci_halfwidth_age = 0.0;
  double ci_halfwidth_sampling_rate = 0.0;
  double ci_halfwidth_successful_rate = 0.0;
  long long epochs_observed = 0;
  double dt = 0.0;
  std::vector<ReplicationResult> replications;
  std::vector<std::string> warnings;
};

/// splitmix64 mix of (seed, stream); used for every derived seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// One long run. `trace`, when set, receives a row at least every
/// `trace_every` time units (and at every delivery).
ReplicationResult run_replication(const Policy& policy, const ChannelModel& channel,
                                  const SimConfig& sc, Rng& rng, const TraceSink& trace = {},
                                  double trace_every = 0.0);

/// Replication k runs on the stream derive_seed(seed, k).
SimResult run_experiment(const Policy& policy, const ChannelModel& channel, const SimConfig& sc);

/// Mean and 1.96 * sd / sqrt(n) of a sample (half-width 0 for n < 2).
struct MeanCi {
  double mean;
  double halfwidth;
};
MeanCi mean_ci(const std::vector<double>& xs);

/// Empirical moments of the waiting stage of a threshold policy started at
/// error w0, on the simulator's time grid.
struct EpochStats {
  double mean_tau;
  double se_tau;
  double mean_sq_integral;
  double se_sq_integral;
  double p_exit_plus;
  double se_exit_plus;
  double mean_exit_abs;
  long long stages;
};
EpochStats epoch_statistics(double v, double w0, double dt, long long stages, Rng& rng);

}  // namespace remsamp
