#include "remsamp/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "remsamp/error.hpp"

namespace remsamp {

namespace {

std::size_t half_count(std::size_t nodes) {
  if (nodes < 9 || nodes % 2 == 0) {
    throw InvalidArgument("grid needs an odd number of nodes, at least 9");
  }
  return (nodes - 1) / 2;
}

// Least squares for f ~ c_hi * b(w) + c_lo over the outer tenth of the
// non-negative nodes, with b(w) = w^2 (even) or w (odd).
Tail fit_tail(std::span<const double> half, double h, Parity parity) {
  const std::size_t n = half.size() - 1;
  const std::size_t first = n - std::max<std::size_t>(n / 10, 3);
  double sb = 0, sbb = 0, sf = 0, sbf = 0;
  double count = 0;
  for (std::size_t i = first; i <= n; ++i) {
    const double w = h * static_cast<double>(i);
    const double b = parity == Parity::Even ? w * w : w;
    sb += b;
    sbb += b * b;
    sf += half[i];
    sbf += b * half[i];
    count += 1;
  }
  const double det = count * sbb - sb * sb;
  const double hi = (count * sbf - sb * sf) / det;
  const double lo = (sf - hi * sb) / count;
  Tail t;
  if (parity == Parity::Even) {
    t.a2 = hi;
  } else {
    t.a1 = hi;
  }
  t.a0 = lo;
  // Continuity at the boundary node.
  const double wmax = h * static_cast<double>(n);
  t.a0 += half[n] - (t.a2 * wmax * wmax + t.a1 * wmax + t.a0);
  return t;
}

}  // namespace

GridFunction::GridFunction(double wmax, std::size_t nodes, Parity parity)
    : wmax_(wmax), parity_(parity), values_(nodes, 0.0), second_(nodes, 0.0) {
  const std::size_t half = half_count(nodes);
  if (!(wmax > 0.0)) throw InvalidArgument("grid half-width must be positive");
  h_ = wmax / static_cast<double>(half);
}

GridFunction GridFunction::from_half(double wmax, std::span<const double> half_values,
                                     Parity parity) {
  const double h = wmax / static_cast<double>(half_values.size() - 1);
  return from_half(wmax, half_values, parity, fit_tail(half_values, h, parity));
}

GridFunction GridFunction::from_half(double wmax, std::span<const double> half_values,
                                     Parity parity, Tail tail) {
  const std::size_t half = half_values.size() - 1;
  GridFunction g(wmax, 2 * half + 1, parity);
  for (std::size_t i = 0; i <= half; ++i) {
    const double v = half_values[i];
    if (!std::isfinite(v)) {
      throw NumericalError("grid function: non-finite value at node w = " +
                           std::to_string(g.h_ * static_cast<double>(i)) +
                           " (grid too small?)");
    }
    g.values_[half + i] = v;
    g.values_[half - i] = parity == Parity::Even ? v : -v;
  }
  if (parity == Parity::Odd) g.values_[half] = 0.0;
  if (!std::isfinite(tail.a2) || !std::isfinite(tail.a1) || !std::isfinite(tail.a0)) {
    throw NumericalError("grid function: non-finite tail coefficients");
  }
  g.tail_ = tail;
  g.build_spline();
  return g;
}

void GridFunction::build_spline() {
  // Cubic spline with end second derivatives taken from the tail, solved by
  // the Thomas algorithm.
  const std::size_t n = values_.size();
  const double end_curv = 2.0 * tail_.a2;
  const double left = parity_ == Parity::Even ? end_curv : -end_curv;
  const double right = end_curv;
  second_.assign(n, 0.0);
  second_.front() = left;
  second_.back() = right;
  const std::size_t m = n - 2;
  std::vector<double> c(m), d(m);
  const double scale = 6.0 / (h_ * h_);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    double rhs = scale * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]);
    if (k == 0) rhs -= left;
    if (k == m - 1) rhs -= right;
    // Row: 1*M_{i-1} + 4*M_i + 1*M_{i+1} = rhs
    const double denom = k == 0 ? 4.0 : 4.0 - c[k - 1];
    c[k] = 1.0 / denom;
    d[k] = (k == 0 ? rhs : rhs - d[k - 1]) / denom;
  }
  for (std::size_t k = m; k-- > 0;) {
    second_[k + 1] = k == m - 1 ? d[k] : d[k] - c[k] * second_[k + 2];
  }
}

double GridFunction::derivative(double w) const {
  if (w > wmax_ || w < -wmax_) {
    const double a = std::abs(w);
    const double slope = 2.0 * tail_.a2 * a + tail_.a1;
    if (parity_ == Parity::Even) return w < 0 ? -slope : slope;
    return slope;
  }
  const double x = (w + wmax_) / h_;
  std::size_t i = static_cast<std::size_t>(x);
  if (i >= values_.size() - 1) i = values_.size() - 2;
  const double b = x - static_cast<double>(i);
  const double a = 1.0 - b;
  return (values_[i + 1] - values_[i]) / h_ +
         (-(3.0 * a * a - 1.0) * second_[i] + (3.0 * b * b - 1.0) * second_[i + 1]) * (h_ / 6.0);
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
  if (other.values_.size() != values_.size() || other.wmax_ != wmax_ || other.parity_ != parity_) {
    throw InvalidArgument("grid function difference: incompatible grids");
  }
  GridFunction r = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    r.values_[i] -= other.values_[i];
    r.second_[i] -= other.second_[i];
  }
  r.tail_ = {tail_.a2 - other.tail_.a2, tail_.a1 - other.tail_.a1, tail_.a0 - other.tail_.a0};
  return r;
}

GridFunction GridFunction::operator*(double s) const {
  GridFunction r = *this;
  for (auto& v : r.values_) v *= s;
  for (auto& v : r.second_) v *= s;
  r.tail_ = {tail_.a2 * s, tail_.a1 * s, tail_.a0 * s};
  return r;
}

}  // namespace remsamp
