#include "ldp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ldp/error.hpp"

namespace ldp {

namespace {

void require_finite(double theta) {
  if (!std::isfinite(theta)) throw DomainError("log-MGF argument must be finite", "non-finite");
}

double real_gcd(double a, double b, double eps) {
  while (b > eps) {
    double r = std::fmod(a, b);
    if (b - r <= eps) r = 0.0;
    a = b;
    b = r;
  }
  return a;
}

}  // namespace

void gauss_legendre_unit(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= count; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = count * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Map [-1, 1] -> [0, 1].
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (1.0 - x);
    nodes[count - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = weights[count - 1 - i] = 0.5 * w;
  }
}

std::optional<double> common_lattice_span(std::span<const double> values, double tolerance,
                                          double max_steps) {
  if (values.size() < 2) return std::nullopt;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double x0 = *lo_it;
  const double range = *hi_it - x0;
  const double eps = tolerance * std::max(1.0, range);
  if (range <= eps) return std::nullopt;

  double span = 0.0;
  for (double v : values) {
    const double d = v - x0;
    if (d <= eps) continue;
    span = span == 0.0 ? d : real_gcd(std::max(span, d), std::min(span, d), eps);
  }
  if (span <= eps) return std::nullopt;
  const double steps = std::round(range / span);
  if (steps > max_steps) return std::nullopt;
  span = range / steps;
  for (double v : values) {
    const double k = std::round((v - x0) / span);
    if (std::abs(v - x0 - k * span) > eps) return std::nullopt;
  }
  return span;
}

double stimulation_rate_from_dissociation(double r, double t_star) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw DomainError("dissociation rate must be positive", "dissociation-rate");
  if (!(t_star >= 0.0)) throw DomainError("threshold time must be nonnegative", "threshold-time");
  // P(T > t*) = exp(-r t*), E[T] = 1/r.
  return r * std::exp(-r * t_star);
}

BoundedDistribution BoundedDistribution::discrete(std::vector<double> support,
                                                  std::vector<double> probs) {
  if (support.empty()) throw SchemaError("discrete law needs at least one support point");
  if (support.size() != probs.size())
    throw SchemaError("discrete law: support and probs lengths differ");
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i]) || support[i] < 0.0)
      throw SchemaError("discrete law: support points must be finite and nonnegative");
    if (!std::isfinite(probs[i]) || probs[i] < 0.0)
      throw SchemaError("discrete law: probabilities must be nonnegative");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw SchemaError("discrete law: probabilities must sum to 1 (got " + std::to_string(total) +
                      ")");
  BoundedDistribution d;
  d.kind_ = DistributionKind::Discrete;
  d.points_ = std::move(support);
  d.weights_ = std::move(probs);
  d.finalize();
  return d;
}

BoundedDistribution BoundedDistribution::degenerate(double value) {
  return discrete({value}, {1.0});
}

BoundedDistribution BoundedDistribution::uniform_on(std::vector<double> support) {
  const std::size_t k = support.size();
  if (k == 0) throw SchemaError("uniform law needs at least one support point");
  std::vector<double> probs(k, 1.0 / static_cast<double>(k));
  // Absorb rounding so the sum is exactly representable near 1.
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < k; ++i) rest -= probs[i];
  probs.back() = rest;
  return discrete(std::move(support), std::move(probs));
}

BoundedDistribution BoundedDistribution::scaled_beta(double alpha, double beta, double max,
                                                     int nodes) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw SchemaError("scaled_beta: alpha, beta must be > 0");
  if (!(max > 0.0) || !std::isfinite(max)) throw SchemaError("scaled_beta: max must be > 0");
  if (nodes < 2) throw SchemaError("scaled_beta: need at least 2 quadrature nodes");
  BoundedDistribution d;
  d.kind_ = DistributionKind::ScaledBeta;
  d.alpha_ = alpha;
  d.beta_ = beta;
  std::vector<double> t, w;
  gauss_legendre_unit(nodes, t, w);
  const double log_norm = std::lgamma(alpha + beta) - std::lgamma(alpha) - std::lgamma(beta);
  double total = 0.0;
  for (int i = 0; i < nodes; ++i) {
    w[i] *= std::exp(log_norm + (alpha - 1.0) * std::log(t[i]) + (beta - 1.0) * std::log1p(-t[i]));
    total += w[i];
  }
  for (int i = 0; i < nodes; ++i) {
    w[i] /= total;
    t[i] *= max;
  }
  d.points_ = std::move(t);
  d.weights_ = std::move(w);
  d.finalize();
  d.lower_ = 0.0;
  d.upper_ = max;
  return d;
}

void BoundedDistribution::finalize() {
  if (kind_ == DistributionKind::Discrete) {
    std::vector<std::size_t> order(points_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points_[a] < points_[b]; });
    std::vector<double> pts, wts;
    for (std::size_t idx : order) {
      if (weights_[idx] == 0.0) continue;
      if (!pts.empty() && pts.back() == points_[idx]) {
        wts.back() += weights_[idx];
      } else {
        pts.push_back(points_[idx]);
        wts.push_back(weights_[idx]);
      }
    }
    if (pts.empty()) throw SchemaError("discrete law has no point with positive probability");
    points_ = std::move(pts);
    weights_ = std::move(wts);
    lattice_span_ = common_lattice_span(points_);
  } else {
    lattice_span_.reset();
  }
  lower_ = points_.front();
  upper_ = points_.back();
  cdf_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cdf_.begin());
}

double BoundedDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) m += weights_[i] * points_[i];
  return m;
}

double BoundedDistribution::second_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) m += weights_[i] * points_[i] * points_[i];
  return m;
}

MomentSummary BoundedDistribution::moments() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = points_[i] - m;
    v += weights_[i] * d * d;
  }
  return {m, v, upper_};
}

LogMgf BoundedDistribution::cumulants(double theta) const {
  require_finite(theta);
  if (points_.size() == 1) return {theta * points_[0], points_[0], 0.0};
  if (theta == 0.0) {
    const auto m = moments();
    return {0.0, m.mean, m.variance};
  }
  double shift = -INFINITY;
  for (double x : points_) shift = std::max(shift, theta * x);
  double z = 0.0, s1 = 0.0;
  // Tilted weights are recomputed in the second pass rather than stored.
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double e = weights_[i] * std::exp(theta * points_[i] - shift);
    z += e;
    s1 += e * points_[i];
  }
  const double mu = s1 / z;
  double s2 = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = points_[i] - mu;
    s2 += weights_[i] * std::exp(theta * points_[i] - shift) * d * d;
  }
  return {shift + std::log(z), mu, std::max(0.0, s2 / z)};
}

double BoundedDistribution::log_mgf(double theta) const {
  require_finite(theta);
  if (points_.size() == 1) return theta * points_[0];
  if (theta == 0.0) return 0.0;
  double shift = -INFINITY;
  for (double x : points_) shift = std::max(shift, theta * x);
  double z = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i)
    z += weights_[i] * std::exp(theta * points_[i] - shift);
  return shift + std::log(z);
}

double BoundedDistribution::dlog_mgf(double theta) const { return cumulants(theta).d1; }
double BoundedDistribution::d2log_mgf(double theta) const { return cumulants(theta).d2; }

double BoundedDistribution::sample(Rng& rng) const {
  if (points_.size() == 1) return points_[0];
  if (kind_ == DistributionKind::ScaledBeta) {
    std::gamma_distribution<double> ga(alpha_, 1.0), gb(beta_, 1.0);
    const double x = ga(rng.engine());
    const double y = gb(rng.engine());
    const double s = x + y;
    const double t = s > 0.0 ? x / s : 0.5;
    return std::clamp(upper_ * t, lower_, upper_);
  }
  const double u = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::size_t>(it - cdf_.begin(), points_.size() - 1);
  return points_[idx];
}

BoundedDistribution BoundedDistribution::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor))
    throw DomainError("scale factor must be finite and nonnegative", "scale");
  if (factor == 0.0) return degenerate(0.0);
  BoundedDistribution d = *this;
  for (double& x : d.points_) x *= factor;
  if (kind_ == DistributionKind::Discrete) {
    d.finalize();
  } else {
    d.lower_ = lower_ * factor;
    d.upper_ = upper_ * factor;
  }
  return d;
}

BoundedDistribution BoundedDistribution::tilted(double theta) const {
  require_finite(theta);
  BoundedDistribution d;
  d.kind_ = DistributionKind::Discrete;
  d.points_ = points_;
  d.weights_.resize(points_.size());
  double shift = -INFINITY;
  for (double x : points_) shift = std::max(shift, theta * x);
  double z = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    d.weights_[i] = weights_[i] * std::exp(theta * points_[i] - shift);
    z += d.weights_[i];
  }
  for (double& w : d.weights_) w /= z;
  d.finalize();
  return d;
}

BoundedDistribution BoundedDistribution::discretization() const {
  if (kind_ == DistributionKind::Discrete) return *this;
  BoundedDistribution d;
  d.kind_ = DistributionKind::Discrete;
  d.points_ = points_;
  d.weights_ = weights_;
  d.finalize();
  return d;
}

std::string BoundedDistribution::describe() const {
  std::ostringstream os;
  os.precision(6);
  if (kind_ == DistributionKind::ScaledBeta) {
    os << "scaled_beta(alpha=" << alpha_ << ", beta=" << beta_ << ", max=" << upper_
       << ", nodes=" << points_.size() << ")";
  } else {
    os << "discrete(" << points_.size() << " points on [" << lower_ << ", " << upper_ << "]";
    if (is_degenerate()) os << ", degenerate";
    else if (lattice_span_) os << ", lattice span " << *lattice_span_;
    os << ")";
  }
  return os.str();
}

BoundedDistribution product_law(const BoundedDistribution& z, const BoundedDistribution& w) {
  std::vector<double> pts;
  std::vector<double> probs;
  pts.reserve(z.points().size() * w.points().size());
  probs.reserve(pts.capacity());
  for (std::size_t i = 0; i < z.points().size(); ++i) {
    for (std::size_t k = 0; k < w.points().size(); ++k) {
      pts.push_back(z.points()[i] * w.points()[k]);
      probs.push_back(z.weights()[i] * w.weights()[k]);
    }
  }
  return BoundedDistribution::discrete(std::move(pts), std::move(probs));
}

}  // namespace ldp
