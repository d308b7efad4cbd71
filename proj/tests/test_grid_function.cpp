#include <doctest.h>

#include <cmath>
#include <vector>

#include "remsamp/grid_function.hpp"

using namespace remsamp;

TEST_CASE("quadratics are reproduced exactly, including the tail") {
  const auto f = [](double w) { return 2.0 * w * w - 3.0; };
  const GridFunction g = GridFunction::tabulate(5.0, 101, Parity::Even, f);
  for (double w : {0.0, 0.013, 1.7, -2.9, 4.99, 5.0, 6.5, -40.0}) {
    CHECK(g(w) == doctest::Approx(f(w)).epsilon(1e-10));
    CHECK(g.derivative(w) == doctest::Approx(4.0 * w).epsilon(1e-8).scale(1.0));
  }
  CHECK(g.tail().a2 == doctest::Approx(2.0));
  CHECK(g.size() == 101);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.node(0) == -5.0);
}

TEST_CASE("smooth functions interpolate to spline accuracy") {
  // The end curvature comes from the fitted quadratic tail, so near the ends
  // the error is O(h^2); away from them the spline is O(h^4).
  const auto f = [](double w) { return std::cos(w) + 0.1 * w * w; };
  for (std::size_t nodes : {201, 401}) {
    const GridFunction g = GridFunction::tabulate(6.0, nodes, Parity::Even, f);
    double inner = 0.0, all = 0.0;
    for (int i = 0; i <= 6000; ++i) {
      const double w = -6.0 + 12.0 * i / 6000.0;
      const double e = std::abs(g(w) - f(w));
      all = std::max(all, e);
      if (std::abs(w) < 4.0) inner = std::max(inner, e);
    }
    CAPTURE(nodes);
    const double h = g.spacing();
    CHECK(inner < 5.0 * h * h * h * h);
    CHECK(all < h * h);
  }
}

TEST_CASE("odd parity") {
  const auto f = [](double w) { return w * w * w / 3.0 - 2.0 * w; };
  const GridFunction g = GridFunction::tabulate(4.0, 201, Parity::Odd, f);
  for (double w : {0.3, 1.1, 3.7}) {
    CHECK(g(-w) == doctest::Approx(-g(w)).epsilon(1e-14));
    CHECK(g(w) == doctest::Approx(f(w)).epsilon(1e-6));
  }
  CHECK(g(0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  // Outside the grid the tail is continuous with the last node.
  CHECK(g(4.0 + 1e-9) == doctest::Approx(g(4.0)).epsilon(1e-7));
  CHECK(g(-4.0 - 1e-9) == doctest::Approx(g(-4.0)).epsilon(1e-7));
}

TEST_CASE("explicit tail") {
  std::vector<double> half(51);
  for (std::size_t i = 0; i < half.size(); ++i) {
    const double w = 0.1 * static_cast<double>(i);
    half[i] = w * w + 1.0;
  }
  const GridFunction g = GridFunction::from_half(5.0, half, Parity::Even, Tail{1.0, 0.0, 1.0});
  CHECK(g(10.0) == doctest::Approx(101.0));
  CHECK(g(-7.0) == doctest::Approx(50.0));
  CHECK(g(2.05) == doctest::Approx(2.05 * 2.05 + 1.0).epsilon(1e-12));
}

TEST_CASE("arithmetic") {
  const GridFunction a = GridFunction::tabulate(3.0, 61, Parity::Even, [](double w) { return w * w; });
  const GridFunction b = GridFunction::tabulate(3.0, 61, Parity::Even, [](double w) { return 1.0 + w * w / 2; });
  const GridFunction d = a - b;
  const GridFunction s = a * 3.0;
  for (double w : {0.0, 1.23, -2.5, 4.0, -9.0}) {
    CHECK(d(w) == doctest::Approx(w * w / 2 - 1.0).epsilon(1e-10));
    CHECK(s(w) == doctest::Approx(3 * w * w).epsilon(1e-10).scale(1.0));
  }
  const GridFunction other = GridFunction::tabulate(3.0, 41, Parity::Even, [](double w) { return w; });
  CHECK_THROWS(a - other);
  const GridFunction odd = GridFunction::tabulate(3.0, 61, Parity::Odd, [](double w) { return w; });
  CHECK_THROWS(a - odd);
}

TEST_CASE("zero function") {
  const GridFunction z(2.0, 21, Parity::Even);
  for (double w : {0.0, 1.0, 3.0}) CHECK(z(w) == 0.0);
}
