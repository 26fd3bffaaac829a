#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ldp/estimate.hpp"
#include "ldp/model.hpp"
#include "ldp/tilt.hpp"

namespace ldp {

// psi(theta) = (n_c/n) ln M_c(q theta) + (n_v/n) ln M_v(q theta) + (1/n) ln M_W(z_f theta)
// where M_c, M_v are the MGFs of the products Zc*W and Zv*W.
struct AnnealedAssembly {
  CumulantFunction cumulant;
  int n = 0;
  DerivedConstants constants;
  bool lattice = false;
  bool degenerate = false;
  std::shared_ptr<const BoundedDistribution> product_c;
  std::shared_ptr<const BoundedDistribution> product_v;
};

AnnealedAssembly assemble_annealed(const ModelParams& params);

TiltSolution rate_annealed(const ModelParams& params, double a);

ActivationEstimate probability_annealed(const ModelParams& params, double a);

struct RatioEstimate {
  double value = 1.0;
  double log_value = 0.0;
  double theta = 0.0;  // tilt of the z_f = 0 model
  double slope = 0.0;  // d log(ratio) / d z_f
  std::vector<std::string> warnings;
};

// exp(theta_n(a, 0) z_f (L - a n / n_M)), L = ess sup W.
RatioEstimate ratio_annealed(const ModelParams& params, double a, double z_f);

}  // namespace ldp
