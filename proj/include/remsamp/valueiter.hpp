#pragma once

// Inner layer of the threshold solver: for a fixed beta, iterate the
// recursions for G^x_n (odd, drives the threshold root) and J_n (even, the
// n-stage value function) until J converges in the weighted sup-norm.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "remsamp/channel.hpp"
#include "remsamp/grid_function.hpp"

namespace remsamp {

/// Weight u(w) = max(bbar, w^2) of the sup-norm under which the value
/// iteration contracts with modulus rho.
struct NormWeights {
  double bbar;
  double rho;

  double u(double w) const { return std::max(bbar, w * w); }
};

/// E[1 + 2|W_Y|/sqrt(bbar) + W_Y^2/bbar], by quadrature.
double norm_weight_expectation(const DelayModel& delay, double bbar);

/// Smallest bbar on a doubling ladder with E[1 + 2|W_Y|/sqrt(bbar) +
/// W_Y^2/bbar] <= rho/alpha. For alpha = 0 every bbar is admissible and the
/// delay scale E[Y] is returned.
NormWeights choose_norm_weights(const ChannelModel& channel, double rho);

/// sup_w |f(w)| / u(w) over the grid nodes and the polynomial tail.
double weighted_norm(const GridFunction& f, const NormWeights& nw);

/// Grid geometry plus the W_Y quadrature shared by every iterate of a solve.
class Discretization {
 public:
  static constexpr std::size_t kDefaultNodes = 2001;

  Discretization(const ChannelModel& channel, double wmax, std::size_t nodes = kDefaultNodes,
                 int gh_nodes = WyIntegrator::kDefaultGhNodes,
                 double truncation = WyIntegrator::kDefaultTruncation);

  /// sqrt(3 beta_max) + 8 sqrt(q99(Y)): thresholds never exceed sqrt(3 beta)
  /// and one delay step rarely reaches further than 8 s.d. of W_Y.
  static double default_wmax(const DelayModel& delay, double beta_max);

  const ChannelModel& channel() const { return channel_; }
  const WyIntegrator& integrator() const { return integrator_; }
  double wmax() const { return wmax_; }
  std::size_t nodes() const { return nodes_; }
  std::size_t half() const { return (nodes_ - 1) / 2; }
  double spacing() const { return wmax_ / static_cast<double>(half()); }

 private:
  ChannelModel channel_;
  WyIntegrator integrator_;
  double wmax_;
  std::size_t nodes_;
};

/// J_n(w) = g(w, v_n, beta) + alpha * C_n(max(|w|, v_n)), where
/// C_n(m) = E[J_{n-1}(m + W_Y)] is smooth and kept on the grid. J_0 = 0.
class ValueFunction {
 public:
  /// The zero function J_0.
  ValueFunction() = default;

  ValueFunction(GridFunction continuation, double v, double beta, double alpha, Moments m);

  double operator()(double w) const {
    if (zero_) return 0.0;
    const double a = w < 0 ? -w : w;
    const double w2 = w * w;
    const double v2 = v_ * v_;
    double g = 0.5 * m_.second + m_.mean * w2 - m_.mean * beta_;
    if (a < v_) g += (v2 * v2 - w2 * w2) / 6.0 - (beta_ - m_.mean) * (v2 - w2);
    return g + alpha_ * continuation_(a < v_ ? v_ : a);
  }

  /// Exact node values with the exact quadratic tail.
  GridFunction tabulated(const Discretization& disc) const;

  bool is_zero() const { return zero_; }
  double threshold() const { return v_; }
  const GridFunction& continuation() const { return continuation_; }

 private:
  GridFunction continuation_;
  double v_ = 0.0;
  double beta_ = 0.0;
  double alpha_ = 0.0;
  Moments m_{};
  bool zero_ = true;
};

/// G^x_n(w) = E[Y] w + alpha E[ h(w + W_Y) ] with h = G^x_{n-1} outside
/// (-v_prev, v_prev) and beta x - x^3/3 inside. v_prev = 0 for n = 1.
GridFunction gx_update(const GridFunction& gx_prev, double v_prev, double beta,
                       const Discretization& disc);

/// r(w) = G^x_n(w) + w^3/3 - beta w.
double root_function(const GridFunction& gx, double beta, double w);

/// Unique positive root of r on (0, sqrt(3 beta)]. Throws NoRootError when no
/// sign change exists there.
double solve_threshold(const GridFunction& gx, double beta);

/// J_n from J_{n-1} and the threshold v_n.
ValueFunction j_update(const ValueFunction& j_prev, double v_n, double beta,
                       const Discretization& disc);

struct IterationConfig {
  double eps1 = 1e-8;
  /// NaN selects 0.5 (1 + alpha).
  double rho = std::numeric_limits<double>::quiet_NaN();
  int max_iterations = 10000;
};

double default_rho(double alpha);

struct IterState {
  int n = 0;
  double beta = 0.0;
  double v = 0.0;
  GridFunction gx;
  ValueFunction J;
  double norm_J_diff = 0.0;
  double norm_J1 = 0.0;
  int planned_iterations = 0;
  NormWeights weights{};
  std::vector<double> v_history;   // v_1, ..., v_n
  std::vector<double> diff_norms;  // ||J_k - J_{k-1}|| for k = 2..n
};

/// Runs m = ceil(-log_rho(||J_1|| / eps1)) iterations, or fewer once
/// ||J_n - J_{n-1}|| < eps1 (1 - rho) / rho. With alpha = 0 it stops at n = 1.
IterState iterate_to_convergence(double beta, const IterationConfig& cfg,
                                 const Discretization& disc);

}  // namespace remsamp
