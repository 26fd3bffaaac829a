#pragma once

#include <cmath>
#include <vector>

#include "ldp/model.hpp"

namespace testing_support {

// P(Bin(m, 1/2) >= k) by direct summation in log space.
inline double binomial_half_tail(int m, int k) {
  if (k <= 0) return 1.0;
  if (k > m) return 0.0;
  double total = 0.0;
  for (int i = k; i <= m; ++i) {
    const double lc = std::lgamma(m + 1.0) - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0);
    total += std::exp(lc - m * std::log(2.0));
  }
  return total;
}

// n - 1 i.i.d. Bernoulli(1/2) summands (Z == 1, W on {0, 1}), no foreign peptide.
inline ldp::ModelParams bernoulli_model(int n) {
  ldp::ModelParams p;
  p.n_c = n - 2;
  p.n_v = 1;
  p.law_zc = ldp::BoundedDistribution::degenerate(1.0);
  p.law_zv = ldp::BoundedDistribution::degenerate(1.0);
  p.law_w = ldp::BoundedDistribution::discrete({0.0, 1.0}, {0.5, 0.5});
  return p;
}

// Mixed model with small discrete laws.
inline ldp::ModelParams mixed_model(int n_c, int n_v, double z_f) {
  ldp::ModelParams p;
  p.n_c = n_c;
  p.n_v = n_v;
  p.z_f = z_f;
  p.law_zc = ldp::BoundedDistribution::discrete({1.0, 2.0, 3.0}, {0.3, 0.4, 0.3});
  p.law_zv = ldp::BoundedDistribution::discrete({0.0, 2.0, 5.0}, {0.5, 0.3, 0.2});
  p.law_w = ldp::BoundedDistribution::discrete({0.05, 0.3, 0.8, 1.0}, {0.4, 0.3, 0.2, 0.1});
  return p;
}

// Continuous stimulation rates.
inline ldp::ModelParams beta_model(int n_c, int n_v, double z_f) {
  ldp::ModelParams p = mixed_model(n_c, n_v, z_f);
  p.law_w = ldp::BoundedDistribution::scaled_beta(2.0, 5.0, 1.0);
  return p;
}

}  // namespace testing_support
