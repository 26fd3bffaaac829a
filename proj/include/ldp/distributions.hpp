#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldp/rng.hpp"

namespace ldp {

enum class DistributionKind { Discrete, ScaledBeta };

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
  double upper = 0.0;  // essential supremum
};

// Value, first and second derivative of ln E[exp(theta X)].
struct LogMgf {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// A probability law with bounded support [lower, upper].
//
// Finite-discrete laws are handled exactly. Scaled-beta laws (max * Beta(alpha,
// beta)) keep the exact beta for sampling, while every MGF quantity is computed
// on a fixed Gauss-Legendre node set: the nodes and their normalized density
// weights play the role of support and probabilities. Consequently
// log_mgf/dlog_mgf/d2log_mgf of a scaled-beta law are exactly those of its
// discretization().
class BoundedDistribution {
 public:
  static constexpr int kDefaultQuadratureNodes = 128;
  static constexpr double kLatticeTolerance = 1e-9;

  static BoundedDistribution discrete(std::vector<double> support, std::vector<double> probs);
  static BoundedDistribution degenerate(double value);
  static BoundedDistribution uniform_on(std::vector<double> support);
  static BoundedDistribution scaled_beta(double alpha, double beta, double max,
                                         int nodes = kDefaultQuadratureNodes);

  DistributionKind kind() const noexcept { return kind_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  bool is_degenerate() const noexcept { return points_.size() == 1; }
  bool is_lattice() const noexcept { return lattice_span_.has_value() || is_degenerate(); }
  std::optional<double> lattice_span() const noexcept { return lattice_span_; }

  // Support points / probabilities (quadrature nodes / weights for scaled-beta).
  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  int quadrature_nodes() const noexcept { return static_cast<int>(points_.size()); }

  MomentSummary moments() const;
  double mean() const;
  double second_moment() const;

  double log_mgf(double theta) const;
  double dlog_mgf(double theta) const;
  double d2log_mgf(double theta) const;
  LogMgf cumulants(double theta) const;

  double sample(Rng& rng) const;

  // Law of c*X (c >= 0).
  BoundedDistribution scaled(double factor) const;
  // Law with density proportional to exp(theta x) w.r.t. this law (discretized).
  BoundedDistribution tilted(double theta) const;
  // The finite-discrete law actually used for MGF calculus.
  BoundedDistribution discretization() const;

  std::string describe() const;

 private:
  BoundedDistribution() = default;
  void finalize();

  DistributionKind kind_ = DistributionKind::Discrete;
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> cdf_;
  double lower_ = 0.0;
  double upper_ = 0.0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::optional<double> lattice_span_;
};

// Law of Z*W for independent Z, W (support points z*w, in z-major order).
BoundedDistribution product_law(const BoundedDistribution& z, const BoundedDistribution& w);

// Largest span h such that every value is values[0] + k*h for an integer k
// (within tolerance * max(1, range)), provided range/h <= max_steps. Empty
// optional when the values are incommensurable at that resolution or all equal.
std::optional<double> common_lattice_span(std::span<const double> values,
                                          double tolerance = BoundedDistribution::kLatticeTolerance,
                                          double max_steps = 1e6);

// Long-run rate of supra-threshold bindings, P(T > t*) / E[T], for
// exponential binding times with dissociation rate r.
double stimulation_rate_from_dissociation(double r, double t_star);

// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre_unit(int count, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace ldp
