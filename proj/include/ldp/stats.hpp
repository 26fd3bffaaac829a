#pragma once

#include <span>

namespace ldp {

double normal_cdf(double x);

// Inverse standard normal CDF. Acklam's rational approximation refined by one
// Halley step; absolute error below 1e-9 on (0, 1).
double normal_quantile(double p);

// Upper tail of a chi-square variable with two degrees of freedom.
double chi2_2dof_sf(double x);

struct NormalityTest {
  double skewness_z = 0.0;
  double kurtosis_z = 0.0;
  double statistic = 0.0;  // K^2 = zs^2 + zk^2
  double p_value = 1.0;
};

// D'Agostino-Pearson omnibus test (skewness + kurtosis). Requires at least 100
// samples and a nonzero sample variance.
NormalityTest dagostino_pearson(std::span<const double> samples);

// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace ldp
