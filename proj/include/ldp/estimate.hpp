#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldp/distributions.hpp"
#include "ldp/tilt.hpp"

namespace ldp {

// A probability with provenance. For the sharp approximation, log_value is
// always finite even when value underflows; raw_value keeps the pre-clamp
// number.
struct ActivationEstimate {
  double value = 0.0;
  double log_value = 0.0;
  double raw_value = 0.0;
  std::string method = "sharp";
  double std_error = 0.0;
  TiltSolution tilt;
  bool reliable = true;
  bool clamped = false;
  std::vector<std::string> warnings;
  std::optional<std::uint64_t> env_hash;
};

// theta * sqrt(n) below this flags the estimate as unreliable.
inline constexpr double kWeakTiltThreshold = 3.0;

// exp(-n I) / (theta sigma sqrt(2 pi n)), clamped to 1.
ActivationEstimate sharp_estimate(const TiltSolution& tilt, int n);

// One summand family of a sum: the law and the factor it is multiplied by.
struct ScaledTerm {
  const BoundedDistribution* law;
  double scale;
};

// True when the sum of independent scaled terms lives on a lattice (every
// nondegenerate term is discrete and all increments share a common span).
// Quadrature-backed laws count as non-lattice.
bool sum_is_lattice(const std::vector<ScaledTerm>& terms);

}  // namespace ldp
