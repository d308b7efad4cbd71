#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "remsamp/solver.hpp"

using namespace remsamp;

namespace {

double g_ref(double w, double v, double beta, double my, double my2) {
  const double w2 = w * w, v2 = v * v;
  double g = 0.5 * my2 + my * w2 - my * beta;
  if (v2 > w2) g += (v2 * v2 - w2 * w2) / 6.0 - (beta - my) * (v2 - w2);
  return g;
}

// Reliable channel: E[g(W_Y, sqrt(3 (beta - E[Y])), beta)] by Simpson over
// each delay value, then bisection on beta.
double reliable_ref(const std::vector<std::pair<double, double>>& atoms) {
  double my = 0, my2 = 0;
  for (auto [y, p] : atoms) {
    my += p * y;
    my2 += p * y * y;
  }
  auto f = [&](double beta) {
    const double v = std::sqrt(3.0 * (beta - my));
    double s = 0;
    for (auto [y, p] : atoms) {
      auto integrand = [&](double x) { return g_ref(x, v, beta, my, my2) * oracle::normal_pdf(x, y); };
      const double L = 14 * std::sqrt(y);
      s += p * oracle::simpson_split(integrand, -L, L, {-v, v}, 4000);
    }
    return s;
  };
  double lo = my * (1 + 1e-12), hi = 10 * my2 / my + 10 * my;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("reliable closed form against an independent quadrature") {
  CHECK(rel(reliable_closed_form(DelayModel::constant(6)).mse_opt, reliable_ref({{6, 1}})) < 1e-9);
  CHECK(rel(reliable_closed_form(DelayModel::constant(1)).mse_opt, reliable_ref({{1, 1}})) < 1e-9);
  CHECK(rel(reliable_closed_form(DelayModel::two_point(2, 0.5, 4)).mse_opt,
            reliable_ref({{2, 0.5}, {4, 0.5}})) < 1e-9);
  // Brownian scaling: the optimum is linear in a constant delay.
  const double unit = reliable_closed_form(DelayModel::constant(1)).mse_opt;
  CHECK(rel(reliable_closed_form(DelayModel::constant(6)).mse_opt, 6 * unit) < 1e-10);
  CHECK(rel(reliable_closed_form(DelayModel::constant(1e-4)).mse_opt, 1e-4 * unit) < 1e-9);
  const SolverResult r = reliable_closed_form(DelayModel::constant(6));
  CHECK(r.v == doctest::Approx(std::sqrt(3.0 * (r.mse_opt - 6.0))).epsilon(1e-12));
}

TEST_CASE("alpha = 0: value iteration equals the closed form") {
  for (const DelayModel& d :
       {DelayModel::constant(6), DelayModel::constant(1), DelayModel::two_point(2, 0.5, 4)}) {
    CAPTURE(d.describe());
    const SolverResult it = solve_mse_opt(ChannelModel(0.0, d));
    const SolverResult cf = reliable_closed_form(d);
    CHECK(rel(it.mse_opt, cf.mse_opt) < 1e-6);
    CHECK(it.v == doctest::Approx(std::sqrt(3.0 * (it.mse_opt - moments(d).mean))).epsilon(1e-8));
  }
}

TEST_CASE("epoch value against Simpson on the converged value function") {
  const ChannelModel ch(0.3, DelayModel::constant(6));
  const double beta = 11.0;
  const Discretization disc(ch, auto_wmax(ch, {}, 2 * beta));
  const IterState s = iterate_to_convergence(beta, {}, disc);
  auto integrand = [&](double x) { return s.J(x) * oracle::normal_pdf(x, 6.0); };
  const double L = 12 * std::sqrt(6.0);
  const double ref = oracle::simpson_split(integrand, -L, L, {-s.v, s.v}, 20000);
  CHECK(epoch_value(s, disc) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("alpha = 0.3, constant 6") {
  const ChannelModel ch(0.3, DelayModel::constant(6));
  const SolverResult r = solve_mse_opt(ch);
  const AgeResult a = solve_age_opt(ch);
  // Any signal-independent policy has mse equal to its age; a lossless
  // channel does better.
  CHECK(r.mse_opt < a.age_opt);
  CHECK(r.mse_opt > reliable_closed_form(ch.delay()).mse_opt);
  CHECK(r.k2 - r.k1 < SolverConfig{}.eps2);
  CHECK(r.mse_opt >= r.k1);
  CHECK(r.mse_opt <= r.k2);

  // h is decreasing in beta and changes sign at mse_opt.
  std::vector<HSample> hs = r.h_values;
  std::sort(hs.begin(), hs.end(), [](const HSample& x, const HSample& y) { return x.beta < y.beta; });
  for (std::size_t i = 1; i < hs.size(); ++i) {
    if (hs[i].feasible && hs[i - 1].feasible) CHECK(hs[i].h <= hs[i - 1].h);
  }
  for (const HSample& h : hs) {
    if (h.beta < r.k1) CHECK(h.h > 0);
    if (h.beta > r.k2) CHECK(h.h < 0);
  }
  CHECK(h_of_beta(a.age_opt, ch, {}) < 0);
  CHECK(h_of_beta(0.5 * (r.mse_opt + 6.0), ch, {}) > 0);

  // Thresholds fall along the iteration.
  REQUIRE(r.v_history.size() >= 2);
  for (std::size_t k = 1; k < r.v_history.size(); ++k) CHECK(r.v_history[k] <= r.v_history[k - 1] + 1e-12);
  CHECK(r.v == r.v_history.back());
}

TEST_CASE("h is infeasible at or below E[Y]") {
  const ChannelModel ch(0.3, DelayModel::constant(6));
  const Discretization disc(ch, auto_wmax(ch, {}, 20.0));
  const HSample s = h_sample(5.0, {}, disc);
  CHECK_FALSE(s.feasible);
  CHECK(std::isinf(s.h));
  CHECK(s.h > 0);
}

TEST_CASE("age optimum: constant delay is zero-wait") {
  // Zero-wait with geometric retransmissions of a constant c:
  // age = c + E[S^2] / (2 E[S]), E[S] = c / (1 - a), E[S^2] = c^2 (1 + a) / (1 - a)^2.
  for (double alpha : {0.0, 0.3, 0.65}) {
    const double c = 6.0;
    const double es = c / (1 - alpha), es2 = c * c * (1 + alpha) / ((1 - alpha) * (1 - alpha));
    const AgeResult a = solve_age_opt(ChannelModel(alpha, DelayModel::constant(c)));
    CAPTURE(alpha);
    CHECK(a.age_opt == doctest::Approx(c + es2 / (2 * es)).epsilon(1e-12));
    CHECK(a.is_zero_wait);
  }
  CHECK(solve_age_opt(ChannelModel(0.0, DelayModel::constant(6))).age_opt == doctest::Approx(9.0));
  CHECK(age_root_function(ChannelModel(0.0, DelayModel::constant(6)), 9.0) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("age root function against an event simulation") {
  // One epoch: the previous delivery left age Y0; wait until the age reaches
  // beta - E[S], then transmit fresh samples until one succeeds. F(beta) is
  // E[integral of age] - beta E[length].
  const double alpha = 0.65, sigma = 1.5;
  const ChannelModel ch(alpha, DelayModel::lognormal(sigma));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] { return std::exp(sigma * z(rng) - 0.5 * sigma * sigma); };
  const double es = 1.0 / (1 - alpha);
  for (double beta : {3.0, 6.226, 9.0}) {
    oracle::Stat f;
    for (int i = 0; i < 1'000'000; ++i) {
      const double y0 = draw();
      const double start = std::max(y0, beta - es);
      double s = draw();
      while (u(rng) < alpha) s += draw();
      const double end = start + s;
      f.add(0.5 * (end * end - y0 * y0) - beta * (end - y0));
    }
    CAPTURE(beta);
    CHECK(std::abs(f.mean() - age_root_function(ch, beta)) < 3.5 * f.se());
  }
  const AgeResult a = solve_age_opt(ch);
  CHECK(a.age_opt == doctest::Approx(6.22609).epsilon(1e-5));
  CHECK_FALSE(a.is_zero_wait);
  CHECK(a.threshold == doctest::Approx(a.age_opt - es).epsilon(1e-14));
}

TEST_CASE("sign of h across a beta grid") {
  const ChannelModel ch(0.3, DelayModel::constant(6));
  const double mse = solve_mse_opt(ch).mse_opt;
  int changes = 0;
  double prev = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double beta = mse * (0.5 + i / 9.0);
    const double h = h_of_beta(beta, ch, {});
    CAPTURE(beta);
    CHECK((h > 0) == (mse > beta));
    if (i > 0 && (h > 0) != (prev > 0)) ++changes;
    prev = h;
  }
  CHECK(changes == 1);
}

TEST_CASE("configuration checks") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate(0.3));
  c.eps1 = 0;
  CHECK_THROWS_AS(c.validate(0.3), InvalidArgument);
  c = {};
  c.rho = 0.2;
  CHECK_THROWS_AS(c.validate(0.3), InvalidArgument);
  c = {};
  c.grid_nodes = 100;
  CHECK_THROWS_AS(c.validate(0.3), InvalidArgument);
  c = {};
  c.k1 = 5.0;
  CHECK_THROWS_AS(solve_mse_opt(ChannelModel(0.3, DelayModel::constant(6)), c), InvalidArgument);
}
