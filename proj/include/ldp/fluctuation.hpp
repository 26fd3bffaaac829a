#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ldp/model.hpp"

namespace ldp {

using Matrix = std::vector<std::vector<double>>;

struct InvalidPoint {
  double a = 0.0;
  std::string code;
  std::string message;
};

struct FluctuationReport {
  EnvironmentKind kind = EnvironmentKind::R;
  std::vector<double> a_grid;  // valid points only
  std::vector<double> t_grid;  // q_n theta0(a) at which Z_n is evaluated
  int n = 0;
  int replicas = 0;
  std::uint64_t seed = 0;
  std::vector<double> empirical_mean;
  Matrix empirical_cov;
  Matrix predicted_cov;
  Matrix jackknife_se;
  double max_abs_cov_error = 0.0;
  double max_cov_zscore = 0.0;  // max |emp - pred| / jackknife se over entries with se > 0
  std::vector<double> normality_pvalues;  // NaN when the column is constant
  double min_eigen_empirical = 0.0;
  double min_eigen_predicted = 0.0;
  std::vector<InvalidPoint> invalid_points;
  Matrix samples;  // replicas x grid, kept for batch diagnostics
};

// Replica r uses the environment drawn from Rng::substream(seed, r). Z_n is
// evaluated at the deterministic tilt; in the R-case with z_f > 0 the foreign
// rate in the deterministic equation is replaced by E[W].
FluctuationReport simulate_fluctuation(const ModelParams& params, EnvironmentKind kind,
                                       const std::vector<double>& a_grid, int replicas,
                                       std::uint64_t seed);

// p-value of the D'Agostino-Pearson omnibus test.
double normality_diagnostic(std::span<const double> samples);

}  // namespace ldp
