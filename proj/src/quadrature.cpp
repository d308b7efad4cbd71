#include "remsamp/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace remsamp {

QuadratureRule gauss_hermite_normal(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_normal: n must be positive");
  // Newton iteration on orthonormal physicists' Hermite polynomials, then
  // rescaled to the standard normal weight.
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] * inv_sqrt_pi;
  }
  return rule;
}

namespace {

template <unsigned N>
QuadratureRule legendre_from_boost() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = G::abscissa();
  const auto& weights = G::weights();
  QuadratureRule rule;
  for (std::size_t i = abscissa.size(); i-- > 0;) {
    if (abscissa[i] == 0.0) continue;
    rule.nodes.push_back(-abscissa[i]);
    rule.weights.push_back(weights[i]);
  }
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    rule.nodes.push_back(abscissa[i]);
    rule.weights.push_back(weights[i]);
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  static const QuadratureRule r10 = legendre_from_boost<10>();
  static const QuadratureRule r15 = legendre_from_boost<15>();
  static const QuadratureRule r20 = legendre_from_boost<20>();
  static const QuadratureRule r30 = legendre_from_boost<30>();
  switch (n) {
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    case 30: return r30;
    default: throw std::invalid_argument("gauss_legendre: untabulated order");
  }
}

}  // namespace remsamp
