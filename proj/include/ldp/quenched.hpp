#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "ldp/annealed.hpp"
#include "ldp/estimate.hpp"
#include "ldp/model.hpp"
#include "ldp/tilt.hpp"

namespace ldp {

// Conditional per-peptide log-MGF L(t; s) = ln E[exp(t s X)] with X drawn from
// the inner law and s the conditioned value. R-case: X = Z (constitutive or
// variable), s = W_j. Z-case: X = W, s = Z_j. The outer law is the law of s.
struct PeptideGroup {
  BoundedDistribution inner = BoundedDistribution::degenerate(1.0);
  BoundedDistribution outer = BoundedDistribution::degenerate(1.0);
  int count = 0;  // n_c or n_v
};

// Everything that does not depend on the environment.
class QuenchedBackground {
 public:
  QuenchedBackground(const ModelParams& params, EnvironmentKind kind);

  EnvironmentKind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  double q() const noexcept { return q_; }
  double z_f() const noexcept { return z_f_; }
  const DerivedConstants& constants() const noexcept { return constants_; }
  const std::array<PeptideGroup, 2>& groups() const noexcept { return groups_; }
  const BoundedDistribution& law_w() const noexcept { return w_; }

  // L(t; s) and its t-derivatives s K'(t s), s^2 K''(t s).
  CumulantValues peptide(int group, double t, double s) const;
  // Outer expectations E[L(t; S)], E[S K'(t S)], E[S^2 K''(t S)].
  CumulantValues centering(int group, double t) const;
  // g_n(t) = sum_gamma (n_gamma / n) E[L_gamma(t; S)] and derivatives in t.
  CumulantValues g(double t) const;
  // Foreign contribution F(theta) (not divided by n): theta z_f w_f for R,
  // ln M_W(z_f theta) for Z (w_f ignored).
  CumulantValues foreign(double theta, double w_f) const;
  // theta -> g(q theta) + F(theta)/n.
  CumulantFunction deterministic_cumulant(double w_f) const;

 private:
  EnvironmentKind kind_;
  int n_ = 0;
  double q_ = 1.0;
  double z_f_ = 0.0;
  DerivedConstants constants_;
  std::array<PeptideGroup, 2> groups_;
  BoundedDistribution w_ = BoundedDistribution::degenerate(1.0);
};

// Distinct conditioned values with multiplicities, per peptide group. The
// solver evaluates the cumulant many times per environment, so repeated
// values are evaluated once.
using ValueBlocks = std::vector<std::pair<double, int>>;

struct QuenchedAssembly {
  std::shared_ptr<const QuenchedBackground> background;
  Environment env;
  std::array<ValueBlocks, 2> blocks;
  double w_f = 0.0;  // R only
  CumulantFunction cumulant;
  bool lattice = false;
  std::uint64_t env_hash = 0;

  int n() const { return background->n(); }
  // ln M_{gamma,j}(theta) for self peptide j (0-based over constitutive then variable).
  double peptide_log_mgf(int j, double theta) const;
  // Z_n(t), Z_n'(t), Z_n''(t).
  CumulantValues fluctuation(double t) const;
};

QuenchedAssembly assemble_quenched(const ModelParams& params, const Environment& env);
QuenchedAssembly assemble_quenched(std::shared_ptr<const QuenchedBackground> background,
                                   const Environment& env, bool detect_lattice = true);

TiltSolution rate_quenched(const ModelParams& params, const Environment& env, double a);
TiltSolution rate_quenched(const QuenchedAssembly& assembly, double a);

ActivationEstimate probability_quenched(const ModelParams& params, const Environment& env,
                                        double a);
ActivationEstimate probability_quenched(const QuenchedAssembly& assembly, double a);

// Curvature of g_n below this makes the remainder meaningless.
inline constexpr double kDecompositionCurvatureFloor = 1e-8;

struct RateDecomposition {
  double I0 = 0.0;      // a theta0 - g_n(q theta0)
  double theta0 = 0.0;  // deterministic tilt
  double Zn = 0.0;
  double Zn_d1 = 0.0;
  double Zn_d2 = 0.0;
  double g_d2 = 0.0;
  double foreign_term = 0.0;
  double remainder = 0.0;
  double total = 0.0;  // I0 - foreign_term - Zn / sqrt(n) + remainder
  double direct_rate = 0.0;
  double discrepancy = 0.0;  // total - direct_rate
};

RateDecomposition decompose_rate(const ModelParams& params, const Environment& env, double a);
RateDecomposition decompose_rate(const QuenchedAssembly& assembly, double a);

// Deterministic tilt at z_f = 0 (env independent in both cases).
TiltSolution deterministic_tilt(const ModelParams& params, EnvironmentKind kind, double a);

// exp(theta0(a, 0) z_f (W_f - a n / n_M))
RatioEstimate ratio_quenched_R(const ModelParams& params, const Environment& env, double a,
                               double z_f);
// exp(theta~(a, 0) z_f (L - a n / n_M))
RatioEstimate ratio_quenched_Z(const ModelParams& params, double a, double z_f);

}  // namespace ldp
