#include "ldp/estimate.hpp"

#include <cmath>
#include <numbers>

namespace ldp {

ActivationEstimate sharp_estimate(const TiltSolution& tilt, int n) {
  ActivationEstimate est;
  est.tilt = tilt;
  const double nn = static_cast<double>(n);
  const double sigma = std::sqrt(tilt.sigma2);
  est.log_value = -nn * tilt.rate - std::log(tilt.theta * sigma * std::sqrt(2.0 * std::numbers::pi * nn));
  est.raw_value = std::exp(est.log_value);
  est.value = est.raw_value;
  if (tilt.theta * std::sqrt(nn) < kWeakTiltThreshold) {
    est.reliable = false;
    est.warnings.emplace_back("weak-tilt");
  }
  if (est.raw_value > 1.0) {
    est.value = 1.0;
    est.clamped = true;
    est.reliable = false;
    est.warnings.emplace_back("clamped");
  }
  return est;
}

bool sum_is_lattice(const std::vector<ScaledTerm>& terms) {
  std::vector<double> values{0.0};
  for (const auto& t : terms) {
    if (t.law->is_degenerate() || t.scale == 0.0) continue;
    if (t.law->kind() != DistributionKind::Discrete) return false;
    const double lo = t.law->lower();
    for (double x : t.law->points()) {
      if (x > lo) values.push_back((x - lo) * t.scale);
    }
  }
  if (values.size() < 2) return false;
  return common_lattice_span(values).has_value();
}

}  // namespace ldp
