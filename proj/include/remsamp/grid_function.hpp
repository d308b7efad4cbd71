#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace remsamp {

enum class Parity { Even, Odd };

/// Beyond +-wmax a grid function continues as
///   f(w) = s(w) * (a2 w^2 + a1 |w| + a0),  s = 1 (even) or sign(w) (odd).
struct Tail {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
};

/// An even or odd function of the estimation error, tabulated on a uniform
/// symmetric grid over [-wmax, wmax] with cubic-spline interpolation inside
/// and a low-order polynomial tail outside.
class GridFunction {
 public:
  GridFunction() = default;

  /// Identically zero function on a grid of `nodes` points (odd count).
  GridFunction(double wmax, std::size_t nodes, Parity parity);

  /// Builds from values at the non-negative nodes (index 0 is w = 0). The
  /// tail is fitted by least squares on the outer 10% of nodes and shifted to
  /// match the boundary value.
  static GridFunction from_half(double wmax, std::span<const double> half_values, Parity parity);

  /// Same, with a tail supplied by the caller (a0 is not adjusted).
  static GridFunction from_half(double wmax, std::span<const double> half_values, Parity parity,
                                Tail tail);

  /// Samples f at the non-negative nodes and mirrors.
  template <class F>
  static GridFunction tabulate(double wmax, std::size_t nodes, Parity parity, F&& f) {
    const std::size_t half = (nodes - 1) / 2;
    const double h = wmax / static_cast<double>(half);
    std::vector<double> v(half + 1);
    for (std::size_t i = 0; i <= half; ++i) v[i] = f(h * static_cast<double>(i));
    return from_half(wmax, v, parity);
  }

  double operator()(double w) const {
    if (w > wmax_ || w < -wmax_) return tail_value(w);
    const double x = (w + wmax_) / h_;
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= values_.size() - 1) i = values_.size() - 2;
    const double b = x - static_cast<double>(i);
    const double a = 1.0 - b;
    return a * values_[i] + b * values_[i + 1] +
           ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * (h_ * h_ / 6.0);
  }
  double derivative(double w) const;

  Parity parity() const { return parity_; }
  const Tail& tail() const { return tail_; }
  double wmax() const { return wmax_; }
  double spacing() const { return h_; }
  std::size_t size() const { return values_.size(); }
  double node(std::size_t i) const { return -wmax_ + h_ * static_cast<double>(i); }
  std::span<const double> values() const { return values_; }

  GridFunction operator-(const GridFunction& other) const;
  GridFunction operator*(double s) const;

 private:
  void build_spline();
  double tail_value(double w) const {
    const double a = w < 0 ? -w : w;
    const double base = tail_.a2 * a * a + tail_.a1 * a + tail_.a0;
    if (parity_ == Parity::Odd && w < 0) return -base;
    return base;
  }

  double wmax_ = 0.0;
  double h_ = 0.0;
  Parity parity_ = Parity::Even;
  Tail tail_{};
  std::vector<double> values_;
  std::vector<double> second_;  // spline second derivatives at nodes
};

}  // namespace remsamp
