#include "remsamp/channel.hpp"

#include <numbers>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/normal_distribution.hpp>

namespace remsamp {

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

DelayModel DelayModel::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("constant delay must be finite and strictly positive");
  }
  return DelayModel(Constant{c}, {{c, 1.0}});
}

DelayModel DelayModel::two_point(double y1, double p1, double y2) {
  if (!(y1 > 0.0) || !(y2 > 0.0) || !std::isfinite(y1) || !std::isfinite(y2)) {
    throw InvalidArgument("two-point delay support must be finite and strictly positive");
  }
  if (!(p1 > 0.0 && p1 < 1.0)) {
    throw InvalidArgument("two-point delay probability p1 must lie in (0, 1)");
  }
  return DelayModel(TwoPoint{y1, p1, y2}, {{y1, p1}, {y2, 1.0 - p1}});
}

DelayModel DelayModel::lognormal(double sigma, int nodes) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("lognormal sigma must be finite and non-negative");
  }
  if (nodes < 1) throw InvalidArgument("lognormal delay needs at least one quadrature node");
  // Gauss-Hermite nodes on the underlying normal integrate exp(k sigma A)
  // essentially exactly, so E[Y] and E[Y^2] are reproduced. Nodes whose
  // weight is invisible even against y^2 are dropped.
  const QuadratureRule rule = gauss_hermite_normal(nodes);
  const double shift = 0.5 * sigma * sigma;
  std::vector<QuadNode> q;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double y = std::exp(sigma * rule.nodes[i] - shift);
    if (rule.weights[i] * (1.0 + y * y) <= 1e-18) continue;
    q.push_back({y, rule.weights[i]});
  }
  return DelayModel(LognormalNormalized{sigma}, std::move(q));
}

Moments DelayModel::exact_moments() const {
  return std::visit(
      Overloaded{
          [](const Constant& k) { return Moments{k.c, k.c * k.c}; },
          [](const TwoPoint& k) {
            const double p2 = 1.0 - k.p1;
            return Moments{k.p1 * k.y1 + p2 * k.y2, k.p1 * k.y1 * k.y1 + p2 * k.y2 * k.y2};
          },
          [](const LognormalNormalized& k) { return Moments{1.0, std::exp(k.sigma * k.sigma)}; },
      },
      kind_);
}

Moments DelayModel::quadrature_moments() const {
  Moments m{0.0, 0.0};
  for (const auto& n : nodes_) {
    m.mean += n.weight * n.y;
    m.second += n.weight * n.y * n.y;
  }
  return m;
}

double DelayModel::partial_moment(int k, double t) const {
  if (k < 0 || k > 2) throw InvalidArgument("partial_moment: k must be 0, 1 or 2");
  return std::visit(
      Overloaded{
          [&](const Constant& d) { return d.c <= t ? std::pow(d.c, k) : 0.0; },
          [&](const TwoPoint& d) {
            double s = 0.0;
            if (d.y1 <= t) s += d.p1 * std::pow(d.y1, k);
            if (d.y2 <= t) s += (1.0 - d.p1) * std::pow(d.y2, k);
            return s;
          },
          [&](const LognormalNormalized& d) {
            if (t <= 0.0) return 0.0;
            const double mu = -0.5 * d.sigma * d.sigma;
            if (d.sigma == 0.0) return t >= 1.0 ? 1.0 : 0.0;
            // E[Y^k 1{Y<=t}] = exp(k mu + k^2 sigma^2 / 2) Phi((ln t - mu - k sigma^2) / sigma)
            const double scale = std::exp(k * mu + 0.5 * k * k * d.sigma * d.sigma);
            return scale * std_normal_cdf((std::log(t) - mu - k * d.sigma * d.sigma) / d.sigma);
          },
      },
      kind_);
}

double DelayModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile: p must lie in (0, 1)");
  return std::visit(
      Overloaded{
          [](const Constant& d) { return d.c; },
          [&](const TwoPoint& d) {
            const double lo = std::min(d.y1, d.y2);
            const double hi = std::max(d.y1, d.y2);
            const double p_lo = d.y1 <= d.y2 ? d.p1 : 1.0 - d.p1;
            return p <= p_lo ? lo : hi;
          },
          [&](const LognormalNormalized& d) {
            const boost::math::normal_distribution<double> n;
            return std::exp(-0.5 * d.sigma * d.sigma + d.sigma * boost::math::quantile(n, p));
          },
      },
      kind_);
}

double DelayModel::min_support() const {
  return std::visit(Overloaded{
                        [](const Constant& d) { return d.c; },
                        [](const TwoPoint& d) { return std::min(d.y1, d.y2); },
                        [](const LognormalNormalized& d) { return d.sigma == 0.0 ? 1.0 : 0.0; },
                    },
                    kind_);
}

double DelayModel::max_node(double min_weight) const {
  double m = 0.0;
  for (const auto& n : nodes_) {
    if (n.weight > min_weight) m = std::max(m, n.y);
  }
  return m;
}

double DelayModel::sample(Rng& rng) const {
  return std::visit(
      Overloaded{
          [](const Constant& d) { return d.c; },
          [&](const TwoPoint& d) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            return u(rng) < d.p1 ? d.y1 : d.y2;
          },
          [&](const LognormalNormalized& d) {
            boost::random::normal_distribution<double> n;
            return std::exp(d.sigma * n(rng) - 0.5 * d.sigma * d.sigma);
          },
      },
      kind_);
}

std::string DelayModel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Constant& d) { os << "constant(" << d.c << ")"; },
                 [&](const TwoPoint& d) {
                   os << "twopoint(" << d.y1 << ", " << d.p1 << ", " << d.y2 << ")";
                 },
                 [&](const LognormalNormalized& d) { os << "lognormal(" << d.sigma << ")"; },
             },
             kind_);
  return os.str();
}

Moments moments(const DelayModel& delay) { return delay.exact_moments(); }

ChannelModel::ChannelModel(double alpha, DelayModel delay)
    : alpha_(alpha), delay_(std::move(delay)), moments_(delay_.exact_moments()) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw InvalidArgument("failure probability alpha must lie in [0, 1)");
  }
}

bool ChannelModel::sample_success(Rng& rng) const {
  if (alpha_ == 0.0) return true;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) >= alpha_;
}

double wy_density(const DelayModel& delay, double x) {
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  double d = 0.0;
  for (const auto& n : delay.nodes()) {
    d += n.weight * kInvSqrt2Pi / std::sqrt(n.y) * std::exp(-0.5 * x * x / n.y);
  }
  return d;
}

WyIntegrator::WyIntegrator(const DelayModel& delay, int gh_nodes, double truncation)
    : truncation_(truncation) {
  if (gh_nodes < 2) throw InvalidArgument("WyIntegrator: need at least two Gauss-Hermite nodes");
  if (!(truncation > 0.0)) throw InvalidArgument("WyIntegrator: truncation must be positive");
  for (const auto& n : delay.nodes()) {
    weight_.push_back(n.weight);
    sd_.push_back(std::sqrt(n.y));
  }
  const QuadratureRule rule = gauss_hermite_normal(gh_nodes);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    if (std::abs(rule.nodes[i]) > truncation) continue;
    gh_z_.push_back(rule.nodes[i]);
    gh_w_.push_back(rule.weights[i]);
  }
}

}  // namespace remsamp
