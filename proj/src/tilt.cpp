#include "ldp/tilt.hpp"

#include <algorithm>
#include <cmath>

#include "ldp/error.hpp"

namespace ldp {

CumulantFunction::CumulantFunction(std::function<double(double)> psi,
                                   std::function<double(double)> dpsi,
                                   std::function<double(double)> d2psi)
    : eval_([psi = std::move(psi), dpsi = std::move(dpsi), d2psi = std::move(d2psi)](double t) {
        return CumulantValues{psi(t), dpsi(t), d2psi(t)};
      }) {}

double legendre_value(const CumulantFunction& cumulant, double a, double theta) {
  return a * theta - cumulant.psi(theta);
}

TiltSolution solve_tilt(const CumulantFunction& cumulant, double a,
                        std::optional<double> bracket_hint, const TiltOptions& options) {
  if (!std::isfinite(a)) throw DomainError("level must be finite", "non-finite");
  const double tol = options.rel_tol * std::max(1.0, std::abs(a));

  const CumulantValues at_zero = cumulant(0.0);
  if (!(a > at_zero.dpsi)) throw BelowMeanError(a, at_zero.dpsi);

  double hi = options.theta_max;
  CumulantValues at_hi = cumulant(hi);
  while (at_hi.dpsi <= a && hi < options.theta_ceiling) {
    hi = std::min(2.0 * hi, options.theta_ceiling);
    at_hi = cumulant(hi);
  }
  if (at_hi.dpsi <= a) throw SaturationError(a, at_hi.dpsi);

  double lo = 0.0;
  double theta;
  if (bracket_hint && *bracket_hint > lo && *bracket_hint < hi) {
    theta = *bracket_hint;
  } else if (at_zero.d2psi > 0.0) {
    theta = std::clamp((a - at_zero.dpsi) / at_zero.d2psi, 0.0, hi);
    if (theta <= lo || theta >= hi) theta = 0.5 * (lo + hi);
  } else {
    theta = 0.5 * (lo + hi);
  }

  CumulantValues cur = cumulant(theta);
  int iter = 0;
  double last_step = hi - lo;
  for (; iter < options.max_iterations; ++iter) {
    const double f = cur.dpsi - a;
    if (std::abs(f) <= tol) break;
    if (f > 0.0) hi = theta;
    else lo = theta;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;

    double next = theta;
    bool newton_ok = false;
    if (cur.d2psi > 0.0) {
      next = theta - f / cur.d2psi;
      // Accept Newton only if it stays inside the bracket and contracts.
      newton_ok = next > lo && next < hi && std::abs(next - theta) < 0.5 * last_step;
    }
    if (!newton_ok) next = 0.5 * (lo + hi);
    last_step = std::abs(next - theta);
    theta = next;
    cur = cumulant(theta);
  }
  if (iter >= options.max_iterations && std::abs(cur.dpsi - a) > tol)
    throw NumericError("tilt solver did not converge", "tilt-convergence");

  TiltSolution sol;
  sol.theta = theta;
  sol.sigma2 = cur.d2psi;
  sol.rate = a * theta - cur.psi;
  sol.a = a;
  sol.iterations = iter;
  return sol;
}

}  // namespace ldp
