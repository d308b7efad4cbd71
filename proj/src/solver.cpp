#include "remsamp/solver.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace remsamp {

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

Discretization make_disc(const ChannelModel& channel, const SolverConfig& cfg, double beta_max) {
  return Discretization(channel, auto_wmax(channel, cfg, beta_max), cfg.grid_nodes, cfg.gh_nodes,
                        cfg.truncation);
}

}  // namespace

void SolverConfig::validate(double alpha) const {
  if (!(eps1 > 0.0)) throw InvalidArgument("solver: eps1 must be positive");
  if (!(eps2 > 0.0)) throw InvalidArgument("solver: eps2 must be positive");
  if (!std::isnan(rho) && !(rho > alpha && rho < 1.0)) {
    throw InvalidArgument("solver: rho must lie in (alpha, 1)");
  }
  if (!std::isnan(k1) && !std::isnan(k2) && !(k1 < k2)) {
    throw InvalidArgument("solver: bracket needs k1 < k2");
  }
  if (!std::isnan(wmax) && !(wmax > 0.0)) throw InvalidArgument("solver: wmax must be positive");
  if (grid_nodes < 9 || grid_nodes % 2 == 0) {
    throw InvalidArgument("solver: grid_nodes must be odd and at least 9");
  }
  if (gh_nodes < 2) throw InvalidArgument("solver: gh_nodes must be at least 2");
  if (!(truncation > 0.0)) throw InvalidArgument("solver: truncation must be positive");
  if (max_expansions < 0) throw InvalidArgument("solver: max_expansions must be non-negative");
  if (max_inner_iterations < 1) throw InvalidArgument("solver: max_inner_iterations must be >= 1");
}

IterationConfig SolverConfig::iteration() const {
  IterationConfig ic;
  ic.eps1 = eps1;
  ic.rho = rho;
  ic.max_iterations = max_inner_iterations;
  return ic;
}

double auto_wmax(const ChannelModel& channel, const SolverConfig& cfg, double beta_max) {
  if (!std::isnan(cfg.wmax)) return cfg.wmax;
  return Discretization::default_wmax(channel.delay(), beta_max);
}

double epoch_value(const IterState& state, const Discretization& disc) {
  const double v = state.J.threshold();
  const std::array<double, 2> kinks{-v, v};
  return disc.integrator().expect(state.J, 0.0, kinks);
}

HSample h_sample(double beta, const SolverConfig& cfg, const Discretization& disc) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  // For beta <= E[Y] the root function w (w^2/3 + E[Y] - beta) of the first
  // iterate has no sign change either.
  if (!(beta > disc.channel().moments().mean)) return {beta, kInf, kNaN, false, 0};
  try {
    const IterState s = iterate_to_convergence(beta, cfg.iteration(), disc);
    return {beta, epoch_value(s, disc), s.v, true, s.n};
  } catch (const NoRootError&) {
    return {beta, kInf, kNaN, false, 0};
  }
}

double h_of_beta(double beta, const ChannelModel& channel, const SolverConfig& cfg) {
  cfg.validate(channel.alpha());
  const Discretization disc = make_disc(channel, cfg, beta);
  return h_sample(beta, cfg, disc).h;
}

SolverResult solve_mse_opt(const ChannelModel& channel, const SolverConfig& cfg) {
  cfg.validate(channel.alpha());
  const double mean_y = channel.moments().mean;
  double k1 = std::isnan(cfg.k1) ? mean_y + cfg.eps2 : cfg.k1;
  double k2 = std::isnan(cfg.k2) ? solve_age_opt(channel, cfg).age_opt : cfg.k2;
  if (!(k1 > mean_y)) throw InvalidArgument("solver: k1 must exceed E[Y]");
  if (!(k2 > k1)) k2 = k1 + std::max(mean_y, cfg.eps2);

  SolverResult r;
  double cap = k2;
  Discretization disc = make_disc(channel, cfg, cap);
  auto probe = [&](double beta) {
    if (beta > cap) {
      cap = 2.0 * beta;
      disc = make_disc(channel, cfg, cap);
    }
    HSample hs = h_sample(beta, cfg, disc);
    r.h_values.push_back(hs);
    return hs.h;
  };

  // Establish h(k1) > 0 > h(k2), moving k1 towards E[Y] and k2 outwards.
  int expansions = 0;
  double h1 = probe(k1);
  while (!(h1 > 0.0)) {
    if (++expansions > cfg.max_expansions) {
      throw ConvergenceError("solver: could not find beta with h(beta) > 0 above E[Y]");
    }
    k1 = mean_y + 0.5 * (k1 - mean_y);
    h1 = probe(k1);
  }
  double h2 = probe(k2);
  while (!(h2 < 0.0)) {
    if (++expansions > cfg.max_expansions) {
      std::ostringstream os;
      os << "solver: no beta with h(beta) < 0 found up to " << k2;
      throw ConvergenceError(os.str());
    }
    const double width = k2 - k1;
    k1 = k2;
    k2 = k2 + 2.0 * width;
    h2 = probe(k2);
  }

  while (k2 - k1 >= cfg.eps2) {
    const double beta = 0.5 * (k1 + k2);
    if (probe(beta) < 0.0) {
      k2 = beta;
    } else {
      k1 = beta;
    }
    ++r.outer_iters;
  }

  r.mse_opt = 0.5 * (k1 + k2);
  r.k1 = k1;
  r.k2 = k2;
  r.wmax = disc.wmax();
  const IterState s = iterate_to_convergence(r.mse_opt, cfg.iteration(), disc);
  r.v = s.v;
  r.v_history = s.v_history;
  r.inner_iterations = s.n;
  return r;
}

double reliable_root_function(const DelayModel& delay, double beta) {
  const Moments m = delay.exact_moments();
  if (!(beta >= m.mean)) throw InvalidArgument("reliable root: beta must be at least E[Y]");
  const double v = std::sqrt(3.0 * (beta - m.mean));
  const double v2 = v * v;
  // Per delay node y: W_y ~ N(0, y). With a = v / sqrt(y) and P = P(|W_y| < v),
  //   E[W^2; |W| < v] = y (P - 2 a phi(a)),
  //   E[W^4; |W| < v] = y^2 (3 P - 2 (a^3 + 3 a) phi(a)).
  double acc = 0.0;
  for (const auto& node : delay.nodes()) {
    const double y = node.y;
    const double a = v / std::sqrt(y);
    const double p = 2.0 * std_normal_cdf(a) - 1.0;
    const double pdf = std_normal_pdf(a);
    const double m2 = y * (p - 2.0 * a * pdf);
    const double m4 = y * y * (3.0 * p - 2.0 * (a * a * a + 3.0 * a) * pdf);
    const double g = 0.5 * m.second + m.mean * y - m.mean * beta + (v2 * v2 * p - m4) / 6.0 -
                     (beta - m.mean) * (v2 * p - m2);
    acc += node.weight * g;
  }
  return acc;
}

SolverResult reliable_closed_form(const DelayModel& delay, const SolverConfig& cfg) {
  (void)cfg;
  const Moments m = delay.exact_moments();
  double lo = m.mean;  // value 1/2 E[Y^2] > 0
  double hi = 2.0 * m.mean;
  int guard = 0;
  while (reliable_root_function(delay, hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw ConvergenceError("reliable closed form: no sign change");
  }
  SolverResult r;
  while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = reliable_root_function(delay, mid);
    r.h_values.push_back({mid, f, std::sqrt(3.0 * (mid - m.mean)), true, 1});
    if (f < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++r.outer_iters;
  }
  r.mse_opt = 0.5 * (lo + hi);
  r.k1 = lo;
  r.k2 = hi;
  r.v = std::sqrt(3.0 * (r.mse_opt - m.mean));
  r.v_history = {r.v};
  r.inner_iterations = 1;
  return r;
}

double age_root_function(const ChannelModel& channel, double beta) {
  const DelayModel& d = channel.delay();
  const Moments m = channel.moments();
  const double alpha = channel.alpha();
  const double c = m.mean / (1.0 - alpha);
  const double ey2_prime = m.second / (1.0 - alpha) + 2.0 * alpha * m.mean * m.mean /
                                                         ((1.0 - alpha) * (1.0 - alpha));
  const double wbar = beta - c;
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  if (wbar > 0.0) {
    p0 = d.partial_moment(0, wbar);
    p1 = d.partial_moment(1, wbar);
    p2 = d.partial_moment(2, wbar);
  }
  const double e_max = wbar * p0 + m.mean - p1;
  const double e_max2 = wbar * wbar * p0 + m.second - p2;
  const double e_wait = c + wbar * p0 - p1;  // E[max(beta - Y, c)]
  return 0.5 * (e_max2 + 2.0 * e_max * c + ey2_prime - m.second) - beta * e_wait;
}

AgeResult solve_age_opt(const ChannelModel& channel, const SolverConfig& cfg) {
  (void)cfg;
  const Moments m = channel.moments();
  const double c = m.mean / (1.0 - channel.alpha());
  double lo = c;  // F(c) = E[Y^2] / (2 (1 - alpha)) > 0
  double hi = 2.0 * c;
  int guard = 0;
  while (age_root_function(channel, hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw ConvergenceError("age solver: no sign change");
  }
  while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (age_root_function(channel, mid) < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  AgeResult a;
  a.age_opt = 0.5 * (lo + hi);
  a.threshold = a.age_opt - c;
  a.is_zero_wait = a.threshold <= channel.delay().min_support();
  return a;
}

}  // namespace remsamp
