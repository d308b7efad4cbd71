#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "remsamp/valueiter.hpp"

using namespace remsamp;

namespace {

// Stage cost written out independently of the library.
double g_ref(double w, double v, double beta, double my, double my2) {
  const double w2 = w * w, v2 = v * v;
  double g = 0.5 * my2 + my * w2 - my * beta;
  if (v2 > w2) g += (v2 * v2 - w2 * w2) / 6.0 - (beta - my) * (v2 - w2);
  return g;
}

// E[f(w + W_c)] for constant delay c by Simpson over +-12 sd, split at cuts.
template <class F>
double gauss_expect(F f, double w, double c, std::vector<double> cuts = {}) {
  const double sd = std::sqrt(c);
  auto integrand = [&](double x) { return f(x) * oracle::normal_pdf(x - w, c); };
  return oracle::simpson_split(integrand, w - 12 * sd, w + 12 * sd, cuts, 4000);
}

Discretization constant6_disc(double alpha) {
  const ChannelModel ch(alpha, DelayModel::constant(6));
  return Discretization(ch, Discretization::default_wmax(ch.delay(), 22.0));
}

}  // namespace

TEST_CASE("first iterate: G1 = E[Y] w and v1 = sqrt(3 (beta - E[Y]))") {
  const Discretization disc = constant6_disc(0.3);
  const GridFunction g0(disc.wmax(), disc.nodes(), Parity::Odd);
  const GridFunction g1 = gx_update(g0, 0.0, 11.0, disc);
  for (double w : {0.0, 0.5, 2.0, -3.3, 7.9}) CHECK(g1(w) == doctest::Approx(6.0 * w).scale(1.0).epsilon(1e-10));
  const double v1 = solve_threshold(g1, 11.0);
  CHECK(std::abs(v1 - std::sqrt(15.0)) < 1e-6);

  const IterState s = iterate_to_convergence(11.0, {}, disc);
  REQUIRE(!s.v_history.empty());
  CHECK(std::abs(s.v_history.front() - std::sqrt(15.0)) < 1e-6);
}

TEST_CASE("second iterate against an independent quadrature") {
  const double alpha = 0.3, beta = 11.0, c = 6.0;
  const Discretization disc = constant6_disc(alpha);
  const GridFunction g0(disc.wmax(), disc.nodes(), Parity::Odd);
  const GridFunction g1 = gx_update(g0, 0.0, beta, disc);
  const double v1 = solve_threshold(g1, beta);
  const ValueFunction j1 = j_update(ValueFunction{}, v1, beta, disc);
  const GridFunction g2 = gx_update(g1, v1, beta, disc);
  const double v2 = solve_threshold(g2, beta);
  const ValueFunction j2 = j_update(j1, v2, beta, disc);

  // J1 is the stage cost itself.
  for (double w : {0.0, 1.0, 3.5, 5.0}) {
    CHECK(j1(w) == doctest::Approx(g_ref(w, v1, beta, c, c * c)).epsilon(1e-12));
  }

  const double sv1 = std::sqrt(3.0 * (beta - c));
  auto h = [&](double x) { return std::abs(x) < sv1 ? beta * x - x * x * x / 3.0 : c * x; };
  for (double w : {0.0, 0.8, 2.0, 4.5}) {
    const double ref = c * w + alpha * gauss_expect(h, w, c, {-sv1, sv1});
    CHECK(g2(w) == doctest::Approx(ref).scale(1.0).epsilon(1e-7));
  }
  // v2 is the root of G2(w) + w^3/3 - beta w, found here by bisection.
  auto r = [&](double w) {
    return c * w + alpha * gauss_expect(h, w, c, {-sv1, sv1}) + w * w * w / 3.0 - beta * w;
  };
  double lo = 0.1, hi = std::sqrt(3.0 * beta);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (r(mid) < 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(v2 - 0.5 * (lo + hi)) < 1e-7);

  auto j1_ref = [&](double x) { return g_ref(x, sv1, beta, c, c * c); };
  for (double w : {0.0, 1.5, 3.0, 6.0}) {
    const double m = std::max(std::abs(w), v2);
    const double ref = g_ref(w, v2, beta, c, c * c) + alpha * gauss_expect(j1_ref, m, c, {-sv1, sv1});
    CHECK(j2(w) == doctest::Approx(ref).epsilon(1e-7));
  }
}

TEST_CASE("second iterate value at 0 against a Monte Carlo chain") {
  // J2(0) = E[cost of stage 1] + alpha E[stage 2 cost from X after stage 1].
  const double alpha = 0.3, beta = 11.0, c = 6.0;
  const Discretization disc = constant6_disc(alpha);
  const IterationConfig cfg{1e-8, std::numeric_limits<double>::quiet_NaN(), 2};
  const IterState s = iterate_to_convergence(beta, cfg, disc);
  REQUIRE(s.n == 2);
  const double v1 = s.v_history[0], v2 = s.v_history[1];
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  oracle::Stat est;
  for (int i = 0; i < 400000; ++i) {
    const double x = (z(rng) < 0 ? -v2 : v2) + std::sqrt(c) * z(rng);
    est.add(g_ref(0.0, v2, beta, c, c * c) + alpha * g_ref(x, v1, beta, c, c * c));
  }
  CHECK(std::abs(est.mean() - s.J(0.0)) < 3 * est.se());
}

TEST_CASE("Constant 6, beta 11: monotone thresholds, contraction and convexity") {
  const double beta = 11.0;
  const Discretization disc = constant6_disc(0.3);
  const IterState s = iterate_to_convergence(beta, {}, disc);
  REQUIRE(s.v_history.size() >= 8);
  for (std::size_t k = 1; k < s.v_history.size(); ++k) {
    CHECK(s.v_history[k] <= s.v_history[k - 1] + 1e-12);
  }
  const double rho = s.weights.rho;
  CHECK(rho == doctest::Approx(0.65));
  for (std::size_t k = 1; k < s.diff_norms.size(); ++k) {
    CHECK(s.diff_norms[k] <= rho * s.diff_norms[k - 1] + 1e-9);
  }
  CHECK(s.norm_J_diff < 1e-8 * (1 - rho) / rho + 1e-15);

  // Second differences of r on [0, 2 sqrt(3 beta)] are non-negative.
  const double top = 2.0 * std::sqrt(3.0 * beta);
  const int n = 200;
  const double h = top / n;
  for (int i = 1; i < n; ++i) {
    const double w = i * h;
    const double d2 = root_function(s.gx, beta, w + h) - 2 * root_function(s.gx, beta, w) +
                      root_function(s.gx, beta, w - h);
    CHECK(d2 >= -1e-9);
  }
  CHECK(root_function(s.gx, beta, s.v) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("alpha = 0 stops after one iterate at the closed form") {
  const ChannelModel ch(0.0, DelayModel::two_point(2, 0.5, 4));
  const Discretization disc(ch, Discretization::default_wmax(ch.delay(), 20.0));
  const IterState s = iterate_to_convergence(7.0, {}, disc);
  CHECK(s.n == 1);
  CHECK(s.v == doctest::Approx(std::sqrt(3.0 * (7.0 - 3.0))).epsilon(1e-10));
  for (double w : {0.0, 1.0, 4.0}) CHECK(s.J(w) == doctest::Approx(g_ref(w, s.v, 7.0, 3.0, 10.0)));
}

TEST_CASE("norm weights") {
  // Constant delay: E|W| = sqrt(2c/pi), E W^2 = c.
  const double c = 6.0;
  for (double b : {0.1, 3.0, 48.0}) {
    const double ref = 1.0 + 2.0 * std::sqrt(2.0 * c / std::numbers::pi) / std::sqrt(b) + c / b;
    CHECK(norm_weight_expectation(DelayModel::constant(c), b) == doctest::Approx(ref).epsilon(1e-12));
  }
  const ChannelModel ch(0.3, DelayModel::constant(c));
  const NormWeights nw = choose_norm_weights(ch, 0.65);
  CHECK(norm_weight_expectation(ch.delay(), nw.bbar) <= 0.65 / 0.3);
  CHECK(norm_weight_expectation(ch.delay(), nw.bbar / 2) > 0.65 / 0.3);
  CHECK(nw.u(0.0) == nw.bbar);
  CHECK(nw.u(100.0) == 10000.0);

  // The weight bound alpha E[u(|w| + |W_Y|)] <= rho u(w) by Monte Carlo.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  for (double w : {0.0, std::sqrt(nw.bbar), 10.0}) {
    oracle::Stat s;
    for (int i = 0; i < 200000; ++i) s.add(nw.u(std::abs(w) + std::sqrt(c) * std::abs(z(rng))));
    CHECK(0.3 * (s.mean() - 3 * s.se()) <= 0.65 * nw.u(w));
  }

  const ChannelModel lossy(0.9, DelayModel::lognormal(1.5));
  const NormWeights lw = choose_norm_weights(lossy, default_rho(0.9));
  CHECK(norm_weight_expectation(lossy.delay(), lw.bbar) <= default_rho(0.9) / 0.9);
  CHECK_THROWS_AS(choose_norm_weights(ch, 0.2), InvalidArgument);
}

TEST_CASE("weighted norm") {
  const NormWeights nw{4.0, 0.5};
  const GridFunction f = GridFunction::tabulate(10.0, 201, Parity::Even, [](double w) { return 3.0 * w * w - 1.0; });
  // |3 w^2 - 1| / max(4, w^2): 0.25 at 0, 2.75 at w = 2, tending to 3.
  CHECK(weighted_norm(f, nw) == doctest::Approx(3.0));
  const GridFunction g = GridFunction::tabulate(10.0, 201, Parity::Even, [](double w) { return 8.0 - w * w / 100.0; });
  CHECK(weighted_norm(g, nw) == doctest::Approx(2.0));
}

TEST_CASE("grid refinement moves the threshold by less than 1e-4 sqrt(beta)") {
  const double beta = 11.0;
  const ChannelModel ch(0.3, DelayModel::constant(6));
  const double wmax = Discretization::default_wmax(ch.delay(), 22.0);
  const IterState a = iterate_to_convergence(beta, {}, Discretization(ch, wmax, 2001));
  const IterState b = iterate_to_convergence(beta, {}, Discretization(ch, wmax, 4001));
  CHECK(std::abs(a.v - b.v) < 1e-4 * std::sqrt(beta));
}

TEST_CASE("rejects beta at or below E[Y]") {
  const Discretization disc = constant6_disc(0.3);
  CHECK_THROWS_AS(iterate_to_convergence(6.0, {}, disc), InvalidArgument);
  CHECK_THROWS_AS(iterate_to_convergence(2.0, {}, disc), InvalidArgument);
  CHECK_THROWS_AS(Discretization(ChannelModel(0.3, DelayModel::constant(6)), 10.0, 100), InvalidArgument);
}
