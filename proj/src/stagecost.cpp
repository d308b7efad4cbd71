#include "remsamp/stagecost.hpp"

#include <algorithm>
#include <cmath>

namespace remsamp {

double stage_cost(const StageParams& p) {
  const double w2 = p.w * p.w;
  const double v2 = p.v * p.v;
  const double gap2 = std::max(v2 - w2, 0.0);
  const double gap4 = std::max(v2 * v2 - w2 * w2, 0.0);
  return 0.5 * p.mean_y2 + p.mean_y * w2 - p.mean_y * p.beta + gap4 / 6.0 -
         (p.beta - p.mean_y) * gap2;
}

double expected_hitting_time(double w, double v) { return std::max(v * v - w * w, 0.0); }

double expected_sq_integral(double w, double v) {
  const double w2 = w * w;
  const double v2 = v * v;
  return std::max(v2 * v2 - w2 * w2, 0.0) / 6.0;
}

ExitLaw exit_distribution(double w, double v) {
  if (!(v > 0.0)) throw InvalidArgument("exit_distribution: threshold must be positive");
  if (std::abs(w) > v) throw InvalidArgument("exit_distribution: start point outside (-v, v)");
  const double p_plus = (v + w) / (2.0 * v);
  return {p_plus, 1.0 - p_plus};
}

}  // namespace remsamp
