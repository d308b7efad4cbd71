#include "remsamp/valueiter.hpp"

#include <array>
#include <cmath>
#include <string>

#include "remsamp/stagecost.hpp"

namespace remsamp {

double norm_weight_expectation(const DelayModel& delay, double bbar) {
  if (!(bbar > 0.0)) throw InvalidArgument("norm weights: bbar must be positive");
  const std::array<double, 1> kink{0.0};
  const double abs_mean = expect_over_wy(delay, [](double x) { return std::abs(x); }, 0.0, kink);
  const double sq_mean = expect_over_wy(delay, [](double x) { return x * x; }, 0.0);
  return 1.0 + 2.0 * abs_mean / std::sqrt(bbar) + sq_mean / bbar;
}

NormWeights choose_norm_weights(const ChannelModel& channel, double rho) {
  const double alpha = channel.alpha();
  if (!(rho > alpha && rho < 1.0)) {
    throw InvalidArgument("norm weights: rho must lie in (alpha, 1)");
  }
  const double scale = channel.moments().mean;
  if (alpha == 0.0) return {scale, rho};
  const std::array<double, 1> kink{0.0};
  const DelayModel& delay = channel.delay();
  const double abs_mean = expect_over_wy(delay, [](double x) { return std::abs(x); }, 0.0, kink);
  const double sq_mean = expect_over_wy(delay, [](double x) { return x * x; }, 0.0);
  const double bound = rho / alpha;
  double bbar = scale / 1024.0;
  for (int i = 0; i < 200; ++i) {
    if (1.0 + 2.0 * abs_mean / std::sqrt(bbar) + sq_mean / bbar <= bound) return {bbar, rho};
    bbar *= 2.0;
  }
  throw ConvergenceError("norm weights: no admissible bbar found");
}

double weighted_norm(const GridFunction& f, const NormWeights& nw) {
  double best = 0.0;
  const auto values = f.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    best = std::max(best, std::abs(values[i]) / nw.u(f.node(i)));
  }
  // Beyond the grid |f|/u is a2 + a1/w + a0/w^2 (once w^2 >= bbar): check
  // its limit and its interior stationary point.
  const Tail& t = f.tail();
  best = std::max(best, std::abs(t.a2));
  if (t.a1 != 0.0) {
    const double w_star = -2.0 * t.a0 / t.a1;
    if (w_star > f.wmax()) best = std::max(best, std::abs(f(w_star)) / nw.u(w_star));
  }
  return best;
}

Discretization::Discretization(const ChannelModel& channel, double wmax, std::size_t nodes,
                               int gh_nodes, double truncation)
    : channel_(channel), integrator_(channel.delay(), gh_nodes, truncation), wmax_(wmax),
      nodes_(nodes) {
  if (!(wmax > 0.0) || !std::isfinite(wmax)) {
    throw InvalidArgument("discretization: wmax must be positive and finite");
  }
  if (nodes < 9 || nodes % 2 == 0) {
    throw InvalidArgument("discretization: grid needs an odd number of nodes, at least 9");
  }
}

double Discretization::default_wmax(const DelayModel& delay, double beta_max) {
  return std::sqrt(3.0 * std::max(beta_max, 0.0)) + 8.0 * std::sqrt(delay.quantile(0.99));
}

ValueFunction::ValueFunction(GridFunction continuation, double v, double beta, double alpha,
                             Moments m)
    : continuation_(std::move(continuation)), v_(v), beta_(beta), alpha_(alpha), m_(m),
      zero_(false) {}

GridFunction ValueFunction::tabulated(const Discretization& disc) const {
  const std::size_t half = disc.half();
  const double h = disc.spacing();
  std::vector<double> vals(half + 1);
  for (std::size_t i = 0; i <= half; ++i) vals[i] = (*this)(h * static_cast<double>(i));
  if (zero_) return GridFunction::from_half(disc.wmax(), vals, Parity::Even, Tail{});
  // For |w| >= max(v, wmax): g is E[Y] w^2 + 1/2 E[Y^2] - E[Y] beta and the
  // continuation term follows its own tail.
  const Tail& c = continuation_.tail();
  const Tail t{m_.mean + alpha_ * c.a2, alpha_ * c.a1,
               0.5 * m_.second - m_.mean * beta_ + alpha_ * c.a0};
  return GridFunction::from_half(disc.wmax(), vals, Parity::Even, t);
}

GridFunction gx_update(const GridFunction& gx_prev, double v_prev, double beta,
                       const Discretization& disc) {
  const ChannelModel& ch = disc.channel();
  const double mean_y = ch.moments().mean;
  const double alpha = ch.alpha();
  const std::size_t half = disc.half();
  const double h = disc.spacing();
  std::vector<double> vals(half + 1);
  const std::array<double, 2> kinks{-v_prev, v_prev};
  const std::span<const double> bps =
      v_prev > 0.0 ? std::span<const double>(kinks) : std::span<const double>();
  auto integrand = [&](double x) {
    if (std::abs(x) >= v_prev) return gx_prev(x);
    return beta * x - x * x * x / 3.0;
  };
  for (std::size_t i = 0; i <= half; ++i) {
    const double w = h * static_cast<double>(i);
    double value = mean_y * w;
    if (alpha > 0.0) value += alpha * disc.integrator().expect(integrand, w, bps);
    vals[i] = value;
  }
  return GridFunction::from_half(disc.wmax(), vals, Parity::Odd);
}

double root_function(const GridFunction& gx, double beta, double w) {
  return gx(w) + w * w * w / 3.0 - beta * w;
}

double solve_threshold(const GridFunction& gx, double beta) {
  if (!(beta > 0.0)) throw NoRootError("threshold root: beta must be positive");
  auto r = [&](double w) { return root_function(gx, beta, w); };
  auto dr = [&](double w) { return gx.derivative(w) + w * w - beta; };
  double hi = std::sqrt(3.0 * beta);
  if (r(hi) < 0.0) {
    throw NoRootError("threshold root: r(sqrt(3 beta)) < 0 at beta = " + std::to_string(beta));
  }
  // r is convex on w > 0 with r(0) = 0, so r < 0 exactly on (0, v). Halve
  // towards 0 until a negative value shows up.
  double lo = hi;
  bool found = false;
  for (int i = 0; i < 60; ++i) {
    lo *= 0.5;
    if (r(lo) < 0.0) {
      found = true;
      break;
    }
    hi = lo;
  }
  if (!found) {
    throw NoRootError("threshold root: no sign change on (0, sqrt(3 beta)] at beta = " +
                      std::to_string(beta));
  }
  // Safeguarded Newton inside the bracket [lo, hi].
  const double tol = 1e-10 * std::max(1.0, std::pow(beta, 1.5));
  double w = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fw = r(w);
    if (fw < 0.0) {
      lo = w;
    } else {
      hi = w;
    }
    if (std::abs(fw) < tol && hi - lo < 1e-6 * hi) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double d = dr(w);
    double next = d > 0.0 ? w - fw / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    w = next;
  }
  return w;
}

ValueFunction j_update(const ValueFunction& j_prev, double v_n, double beta,
                       const Discretization& disc) {
  const ChannelModel& ch = disc.channel();
  const std::size_t half = disc.half();
  const double h = disc.spacing();
  std::vector<double> vals(half + 1, 0.0);
  if (!j_prev.is_zero() && ch.alpha() > 0.0) {
    const double v_prev = j_prev.threshold();
    const std::array<double, 2> kinks{-v_prev, v_prev};
    for (std::size_t i = 0; i <= half; ++i) {
      vals[i] = disc.integrator().expect(j_prev, h * static_cast<double>(i), kinks);
    }
  }
  GridFunction cont = j_prev.is_zero() || ch.alpha() == 0.0
                          ? GridFunction::from_half(disc.wmax(), vals, Parity::Even, Tail{})
                          : GridFunction::from_half(disc.wmax(), vals, Parity::Even);
  return ValueFunction(std::move(cont), v_n, beta, ch.alpha(), ch.moments());
}

double default_rho(double alpha) { return 0.5 * (1.0 + alpha); }

IterState iterate_to_convergence(double beta, const IterationConfig& cfg,
                                 const Discretization& disc) {
  const ChannelModel& ch = disc.channel();
  const double mean_y = ch.moments().mean;
  if (!(beta > mean_y)) {
    throw InvalidArgument("value iteration needs beta > E[Y]");
  }
  if (!(cfg.eps1 > 0.0)) throw InvalidArgument("value iteration: eps1 must be positive");
  const double rho = std::isnan(cfg.rho) ? default_rho(ch.alpha()) : cfg.rho;

  IterState s;
  s.beta = beta;
  s.weights = choose_norm_weights(ch, rho);

  const GridFunction gx0(disc.wmax(), disc.nodes(), Parity::Odd);
  s.gx = gx_update(gx0, 0.0, beta, disc);
  s.v = solve_threshold(s.gx, beta);
  s.J = j_update(ValueFunction{}, s.v, beta, disc);
  s.n = 1;
  s.v_history.push_back(s.v);
  GridFunction j_tab = s.J.tabulated(disc);
  s.norm_J1 = weighted_norm(j_tab, s.weights);
  s.norm_J_diff = s.norm_J1;

  int m = 1;
  if (ch.alpha() > 0.0 && s.norm_J1 > cfg.eps1) {
    m = static_cast<int>(std::ceil(std::log(s.norm_J1 / cfg.eps1) / std::log(1.0 / rho)));
  }
  m = std::clamp(m, 1, cfg.max_iterations);
  s.planned_iterations = m;

  const double stop = cfg.eps1 * (1.0 - rho) / rho;
  for (int n = 2; n <= m; ++n) {
    GridFunction gx = gx_update(s.gx, s.v, beta, disc);
    const double v = solve_threshold(gx, beta);
    ValueFunction J = j_update(s.J, v, beta, disc);
    GridFunction tab = J.tabulated(disc);
    const double diff = weighted_norm(tab - j_tab, s.weights);
    s.gx = std::move(gx);
    s.v = v;
    s.J = std::move(J);
    j_tab = std::move(tab);
    s.n = n;
    s.v_history.push_back(v);
    s.diff_norms.push_back(diff);
    s.norm_J_diff = diff;
    if (diff < stop) break;
  }
  return s;
}

}  // namespace remsamp
