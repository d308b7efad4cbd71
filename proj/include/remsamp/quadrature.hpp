#pragma once

#include <vector>

namespace remsamp {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal density (probabilists'
/// convention): sum_i w_i f(z_i) ~ E[f(Z)], Z ~ N(0,1). Weights sum to 1.
QuadratureRule gauss_hermite_normal(int n);

/// Gauss-Legendre rule on [-1, 1] (weights sum to 2). Only the tabulated
/// orders 10, 15, 20 and 30 are provided.
const QuadratureRule& gauss_legendre(int n);

}  // namespace remsamp
