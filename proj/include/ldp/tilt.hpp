#pragma once

#include <functional>
#include <optional>

namespace ldp {

struct CumulantValues {
  double psi = 0.0;
  double dpsi = 0.0;
  double d2psi = 0.0;
};

// A scaled cumulant function psi(theta) = (1/n) ln E[exp(theta S_n)] together
// with its first two derivatives. Implementations must be pure: the solver and
// parallel callers may evaluate the same object from several threads.
class CumulantFunction {
 public:
  using Triple = std::function<CumulantValues(double)>;

  CumulantFunction() = default;
  explicit CumulantFunction(Triple eval) : eval_(std::move(eval)) {}
  CumulantFunction(std::function<double(double)> psi, std::function<double(double)> dpsi,
                   std::function<double(double)> d2psi);

  CumulantValues operator()(double theta) const { return eval_(theta); }
  double psi(double theta) const { return eval_(theta).psi; }
  double dpsi(double theta) const { return eval_(theta).dpsi; }
  double d2psi(double theta) const { return eval_(theta).d2psi; }

 private:
  Triple eval_;
};

struct TiltSolution {
  double theta = 0.0;   // solves dpsi(theta) = a
  double sigma2 = 0.0;  // d2psi(theta): variance of the tilted S_n / n, scaled by n
  double rate = 0.0;    // a * theta - psi(theta)
  double a = 0.0;
  int iterations = 0;
};

struct TiltOptions {
  double theta_max = 50.0;       // initial bracket ceiling
  double theta_ceiling = 400.0;  // bracket expands x2 up to here before declaring saturation
  double rel_tol = 1e-10;        // |dpsi(theta) - a| <= rel_tol * max(1, |a|)
  int max_iterations = 200;
};

// Safeguarded Newton on dpsi with bisection fallback inside [0, theta_max].
// Throws BelowMeanError when a <= dpsi(0), SaturationError when dpsi stays
// below a up to the bracket ceiling, NumericError if it fails to converge.
TiltSolution solve_tilt(const CumulantFunction& cumulant, double a,
                        std::optional<double> bracket_hint = std::nullopt,
                        const TiltOptions& options = {});

// a * theta - psi(theta); the Legendre transform value at theta.
double legendre_value(const CumulantFunction& cumulant, double a, double theta);

}  // namespace ldp
