#pragma once

// Unreliable channel: i.i.d. transmission failures with probability alpha and
// i.i.d. positive transmission delays Y. Also hosts the expectations over Y
// and over the Gaussian increment W_Y ~ N(0, Y) used throughout the solver.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "remsamp/error.hpp"
#include "remsamp/quadrature.hpp"

namespace remsamp {

using Rng = std::mt19937_64;

struct QuadNode {
  double y;
  double weight;
};

struct Moments {
  double mean;    // E[Y]
  double second;  // E[Y^2]
};

class DelayModel {
 public:
  struct Constant {
    double c;
  };
  struct TwoPoint {
    double y1;
    double p1;
    double y2;
  };
  /// Y = exp(sigma A) / E[exp(sigma A)], A standard normal; E[Y] = 1.
  struct LognormalNormalized {
    double sigma;
  };
  using Kind = std::variant<Constant, TwoPoint, LognormalNormalized>;

  static constexpr int kDefaultLognormalNodes = 32;

  static DelayModel constant(double c);
  static DelayModel two_point(double y1, double p1, double y2);
  static DelayModel lognormal(double sigma, int nodes = kDefaultLognormalNodes);

  const Kind& kind() const { return kind_; }
  std::span<const QuadNode> nodes() const { return nodes_; }

  /// Closed-form moments.
  Moments exact_moments() const;
  /// Moments of the discrete quadrature law.
  Moments quadrature_moments() const;

  /// E[Y^k 1{Y <= t}] for k in {0, 1, 2}, closed form.
  double partial_moment(int k, double t) const;
  double quantile(double p) const;
  /// Essential infimum of the support (0 for the lognormal family).
  double min_support() const;
  /// Largest quadrature node carrying weight above `min_weight`.
  double max_node(double min_weight = 0.0) const;

  double sample(Rng& rng) const;
  std::string describe() const;

 private:
  DelayModel(Kind kind, std::vector<QuadNode> nodes)
      : kind_(kind), nodes_(std::move(nodes)) {}

  Kind kind_;
  std::vector<QuadNode> nodes_;
};

/// (E[Y], E[Y^2]); exact whenever a closed form exists, which is every
/// supported family.
Moments moments(const DelayModel& delay);

class ChannelModel {
 public:
  ChannelModel(double alpha, DelayModel delay);

  double alpha() const { return alpha_; }
  const DelayModel& delay() const { return delay_; }
  Moments moments() const { return moments_; }

  double sample_delay(Rng& rng) const { return delay_.sample(rng); }
  bool sample_success(Rng& rng) const;

 private:
  double alpha_;
  DelayModel delay_;
  Moments moments_;
};

/// Density of W_Y at x: E_Y[ N(x; 0, Y) ].
double wy_density(const DelayModel& delay, double x);

/// Tensor quadrature for E[f(w + W_Y)]: outer sum over the delay nodes, inner
/// Gauss-Hermite rule for the conditional normal truncated at +-truncation
/// standard deviations. When breakpoints of f fall inside a node's window the
/// window is split there and each piece uses Gauss-Legendre panels.
class WyIntegrator {
 public:
  static constexpr int kDefaultGhNodes = 32;
  static constexpr double kDefaultTruncation = 8.0;

  explicit WyIntegrator(const DelayModel& delay, int gh_nodes = kDefaultGhNodes,
                        double truncation = kDefaultTruncation);

  template <class F>
  double expect(F&& f, double w, std::span<const double> breakpoints = {}) const;

  std::size_t components() const { return sd_.size(); }

 private:
  template <class F>
  double segment(F& f, double a, double b, double w, double sd) const;

  std::vector<double> weight_;
  std::vector<double> sd_;
  std::vector<double> gh_z_;
  std::vector<double> gh_w_;
  double truncation_;
};

/// Convenience: E[f(w + W_Y)] with default quadrature settings.
template <class F>
double expect_over_wy(const DelayModel& delay, F&& f, double w,
                      std::span<const double> breakpoints = {}) {
  return WyIntegrator(delay).expect(f, w, breakpoints);
}

// ---------------------------------------------------------------------------

template <class F>
double WyIntegrator::segment(F& f, double a, double b, double w, double sd) const {
  // Gauss-Legendre panels no wider than 8 standard deviations.
  const double width = (b - a) / sd;
  int panels = 1;
  int order;
  if (width <= 1.0) {
    order = 10;
  } else if (width <= 2.0) {
    order = 15;
  } else if (width <= 4.0) {
    order = 20;
  } else {
    order = 30;
    panels = static_cast<int>(std::ceil(width / 8.0));
  }
  const QuadratureRule& rule = gauss_legendre(order);
  const double panel = (b - a) / panels;
  const double half = 0.5 * panel;
  const double inv_sd = 1.0 / sd;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * panel;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = mid + half * rule.nodes[i];
      const double z = (x - w) * inv_sd;
      acc += rule.weights[i] * f(x) * std::exp(-0.5 * z * z);
    }
  }
  return acc * half * inv_sd * kInvSqrt2Pi;
}

template <class F>
double WyIntegrator::expect(F&& f, double w, std::span<const double> breakpoints) const {
  double total = 0.0;
  double cuts[8];
  for (std::size_t k = 0; k < sd_.size(); ++k) {
    const double sd = sd_[k];
    const double lo = w - truncation_ * sd;
    const double hi = w + truncation_ * sd;
    int ncut = 0;
    for (double bp : breakpoints) {
      if (bp > lo && bp < hi && ncut < 8) cuts[ncut++] = bp;
    }
    double part = 0.0;
    if (ncut == 0) {
      for (std::size_t i = 0; i < gh_z_.size(); ++i) part += gh_w_[i] * f(w + sd * gh_z_[i]);
    } else {
      std::sort(cuts, cuts + ncut);
      double a = lo;
      for (int c = 0; c < ncut; ++c) {
        if (cuts[c] > a) {
          part += segment(f, a, cuts[c], w, sd);
          a = cuts[c];
        }
      }
      part += segment(f, a, hi, w, sd);
    }
    total += weight_[k] * part;
  }
  if (!std::isfinite(total)) {
    throw NumericalError("expect_over_wy: non-finite integrand value at w = " + std::to_string(w));
  }
  return total;
}

}  // namespace remsamp
