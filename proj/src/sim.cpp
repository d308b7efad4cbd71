#include "remsamp/sim.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/random/normal_distribution.hpp>

namespace remsamp {

namespace {

using Normal = boost::random::normal_distribution<double>;

// Error process e = W - What together with the clock and the age. Each
// advance over a deterministic length L draws the exact increment and adds
// the conditional expectation of the integrals given both endpoints.
struct Path {
  double t = 0.0;
  double w = 0.0;
  double e = 0.0;
  double age = 0.0;

  bool measuring = false;
  double t_start = 0.0;
  double mse_int = 0.0;
  double age_int = 0.0;

  void advance(double L, Rng& rng, Normal& normal) {
    const double d = std::sqrt(L) * normal(rng);
    if (measuring) {
      mse_int += L * (e * e + e * d + d * d / 3.0) + L * L / 6.0;
      age_int += L * age + 0.5 * L * L;
    }
    t += L;
    w += d;
    e += d;
    age += L;
    if (!std::isfinite(e)) throw NumericalError("simulator: non-finite path value");
  }
};

// Steps on the grid t0 + k dt until |e| >= v is observed. Far from the
// boundary several grid steps are merged into one exact increment; the
// merged step is at most (distance / 8)^2 long, so a skipped crossing has
// probability of order 1e-15.
template <class OnStep>
void wait_for_threshold(Path& p, double v, double dt, Rng& rng, Normal& normal, OnStep&& on_step) {
  while (std::abs(p.e) < v) {
    const double gap = (v - std::abs(p.e)) / 8.0;
    const double k = std::max(1.0, std::floor(gap * gap / dt));
    p.advance(k * dt, rng, normal);
    on_step();
  }
}

void check_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidArgument(std::string("simulator: ") + what + " must be positive and finite");
  }
}

}  // namespace

void Policy::validate() const {
  if (kind != Kind::ZeroWait && (!(param >= 0.0) || !std::isfinite(param))) {
    throw InvalidArgument("policy threshold must be finite and non-negative");
  }
}

std::string Policy::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::SignalAwareThreshold:
      os << "signal-aware(v=" << param << ")";
      break;
    case Kind::AgeThreshold:
      os << "age-threshold(a=" << param << ")";
      break;
    case Kind::ZeroWait:
      os << "zero-wait";
      break;
  }
  return os.str();
}

double SimConfig::effective_dt(const ChannelModel& channel) const {
  return std::isnan(dt) ? 1e-3 * channel.moments().mean : dt;
}

std::vector<std::string> SimConfig::validate(const ChannelModel& channel) const {
  const double step = effective_dt(channel);
  check_positive(step, "dt");
  check_positive(horizon, "horizon");
  if (replications < 1) throw InvalidArgument("simulator: replications must be at least 1");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw InvalidArgument("simulator: warmup_fraction must lie in [0, 1)");
  }
  if (threads < 1) throw InvalidArgument("simulator: threads must be at least 1");
  if (std::holds_alternative<DelayModel::Constant>(channel.delay().kind()) &&
      step > channel.delay().min_support() / 100.0) {
    throw InvalidArgument("simulator: dt must not exceed 1/100 of the constant delay");
  }
  std::vector<std::string> warnings;
  const double epoch = channel.moments().mean / (1.0 - channel.alpha());
  if (horizon * (1.0 - warmup_fraction) < 100.0 * epoch) {
    warnings.push_back("horizon covers fewer than 100 expected epochs");
  }
  if (replications < 2) warnings.push_back("a single replication gives no confidence interval");
  return warnings;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ReplicationResult run_replication(const Policy& policy, const ChannelModel& channel,
                                  const SimConfig& sc, Rng& rng, const TraceSink& trace,
                                  double trace_every) {
  policy.validate();
  sc.validate(channel);
  const double dt = sc.effective_dt(channel);
  const double warm = sc.warmup_fraction * sc.horizon;

  // Delays and losses come from their own stream, so the k-th transmission
  // sees the same channel whatever the path discretization.
  Rng channel_rng(rng());
  Normal normal;
  Path p;
  long long samples = 0;
  long long deliveries = 0;
  double next_emit = 0.0;

  auto boundary = [&] {
    if (!p.measuring && p.t >= warm) {
      p.measuring = true;
      p.t_start = p.t;
    }
    if (trace && p.t >= next_emit) {
      trace({p.t, p.w, p.w - p.e, p.age});
      next_emit = p.t + trace_every;
    }
  };
  boundary();

  // The first sample is taken at t = 0 under every policy.
  bool first = true;
  while (p.t < sc.horizon) {
    switch (first ? Policy::Kind::ZeroWait : policy.kind) {
      case Policy::Kind::SignalAwareThreshold:
        wait_for_threshold(p, policy.param, dt, rng, normal, boundary);
        break;
      case Policy::Kind::AgeThreshold:
        if (p.age < policy.param) {
          p.advance(policy.param - p.age, rng, normal);
          boundary();
        }
        break;
      case Policy::Kind::ZeroWait:
        break;
    }
    if (p.t >= sc.horizon) break;

    first = false;

    // Transmit the sample W_S.
    const double w_sample = p.w;
    if (p.measuring) ++samples;
    const double y = channel.sample_delay(channel_rng);
    p.advance(y, rng, normal);
    if (channel.sample_success(channel_rng)) {
      p.e = p.w - w_sample;
      p.age = y;
      if (p.measuring) ++deliveries;
    }
    next_emit = std::min(next_emit, p.t);
    boundary();
  }

  ReplicationResult r;
  r.total_time = p.t;
  r.measured_time = p.measuring ? p.t - p.t_start : 0.0;
  r.samples = samples;
  r.deliveries = deliveries;
  if (r.measured_time > 0.0) {
    r.avg_mse = p.mse_int / r.measured_time;
    r.avg_age = p.age_int / r.measured_time;
    r.sampling_rate = static_cast<double>(samples) / r.measured_time;
    r.successful_rate = static_cast<double>(deliveries) / r.measured_time;
  }
  return r;
}

MeanCi mean_ci(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

SimResult run_experiment(const Policy& policy, const ChannelModel& channel, const SimConfig& sc) {
  policy.validate();
  SimResult out;
  out.warnings = sc.validate(channel);
  out.dt = sc.effective_dt(channel);
  const int n = sc.replications;
  out.replications.resize(n);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      Rng rng(derive_seed(sc.seed, static_cast<std::uint64_t>(k)));
      out.replications[k] = run_replication(policy, channel, sc, rng);
    }
  };
  const int threads = std::min(sc.threads, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        try {
          worker();
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> mse, age, rate, srate;
  for (const auto& r : out.replications) {
    mse.push_back(r.avg_mse);
    age.push_back(r.avg_age);
    rate.push_back(r.sampling_rate);
    srate.push_back(r.successful_rate);
    out.epochs_observed += r.deliveries;
  }
  const MeanCi m = mean_ci(mse), a = mean_ci(age), s = mean_ci(rate), ss = mean_ci(srate);
  out.avg_mse = m.mean;
  out.ci_halfwidth_mse = m.halfwidth;
  out.avg_age = a.mean;
  out.ci_halfwidth_age = a.halfwidth;
  out.sampling_rate = s.mean;
  out.ci_halfwidth_sampling_rate = s.halfwidth;
  out.successful_rate = ss.mean;
  out.ci_halfwidth_successful_rate = ss.halfwidth;
  return out;
}

EpochStats epoch_statistics(double v, double w0, double dt, long long stages, Rng& rng) {
  check_positive(v, "v");
  check_positive(dt, "dt");
  if (stages < 2) throw InvalidArgument("epoch_statistics: need at least two stages");
  if (std::abs(w0) > v) throw InvalidArgument("epoch_statistics: |w0| must not exceed v");
  Normal normal;
  double s_tau = 0, s_tau2 = 0, s_int = 0, s_int2 = 0, s_abs = 0;
  long long plus = 0;
  for (long long i = 0; i < stages; ++i) {
    Path p;
    p.e = w0;
    p.measuring = true;
    wait_for_threshold(p, v, dt, rng, normal, [] {});
    s_tau += p.t;
    s_tau2 += p.t * p.t;
    s_int += p.mse_int;
    s_int2 += p.mse_int * p.mse_int;
    s_abs += std::abs(p.e);
    if (p.e > 0.0) ++plus;
  }
  const double n = static_cast<double>(stages);
  auto se = [n](double s, double s2) {
    const double mean = s / n;
    return std::sqrt(std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0)) / n);
  };
  EpochStats st;
  st.stages = stages;
  st.mean_tau = s_tau / n;
  st.se_tau = se(s_tau, s_tau2);
  st.mean_sq_integral = s_int / n;
  st.se_sq_integral = se(s_int, s_int2);
  st.p_exit_plus = static_cast<double>(plus) / n;
  st.se_exit_plus = std::sqrt(st.p_exit_plus * (1.0 - st.p_exit_plus) / n);
  st.mean_exit_abs = s_abs / n;
  return st;
}

}  // namespace remsamp
