#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldp/distributions.hpp"
#include "ldp/rng.hpp"

namespace ldp {

// One model instance: n_c constitutive and n_v variable self-peptide types with
// i.i.d. copy numbers, one foreign type with z_f copies, and i.i.d. stimulation
// rates. The total stimulation rate is
//   G = q_n (sum_j Zc_j W_j + sum_j Zv_j W_j) + z_f W_f.
struct ModelParams {
  int n_c = 1;
  int n_v = 1;
  double z_f = 0.0;
  BoundedDistribution law_zc = BoundedDistribution::degenerate(1.0);
  BoundedDistribution law_zv = BoundedDistribution::degenerate(1.0);
  BoundedDistribution law_w = BoundedDistribution::degenerate(1.0);
  double a = 0.0;  // threshold slope, g_act = a * n
  std::uint64_t seed = 0;

  int n() const noexcept { return n_c + n_v + 1; }
  int self_count() const noexcept { return n_c + n_v; }
  ModelParams with_z_f(double z) const {
    ModelParams p = *this;
    p.z_f = z;
    return p;
  }
};

struct DerivedConstants {
  int n = 0;
  double n_M = 0.0;  // expected number of presented self peptides
  double q_n = 1.0;  // displacement factor (n_M - z_f) / n_M
};

// Throws DomainError when z_f >= n_M, SchemaError on malformed counts.
DerivedConstants derived_constants(const ModelParams& params);

// Which side of the randomness a quenched computation conditions on:
// R fixes the receptor (stimulation rates W_1..W_{n-1}, W_f),
// Z fixes the presentation profile (Zc_1..Zc_{n_c}, Zv_1..Zv_{n_v}).
enum class EnvironmentKind { R, Z };

struct Environment {
  EnvironmentKind kind = EnvironmentKind::R;
  std::vector<double> values;
  std::uint64_t seed = 0;  // stream that generated it (0 when supplied by hand)

  double foreign_rate() const { return values.back(); }  // R only
};

std::string to_string(EnvironmentKind kind);
EnvironmentKind environment_kind_from_string(const std::string& s);

// FNV-1a over kind and value bytes; identifies an environment in reports.
std::uint64_t environment_hash(const Environment& env);

// Throws SchemaError on dimension mismatch or out-of-support entries.
void check_environment(const ModelParams& params, const Environment& env);

Environment sample_environment(const ModelParams& params, EnvironmentKind kind, Rng& rng);

// Draw order: all copy numbers (constitutive, then variable), then all
// stimulation rates (self in order, then foreign). Degenerate laws consume no
// randomness, so conditioning on a degenerate side reproduces the
// unconditional stream exactly.
double sample_G(const ModelParams& params, Rng& rng);
double sample_G_given(const ModelParams& params, const Environment& env, Rng& rng);

// Reusable sampler with the same draw order as sample_G / sample_G_given;
// validates once instead of per draw. Keeps a pointer to env.
class GSampler {
 public:
  explicit GSampler(const ModelParams& params, const Environment* env = nullptr);
  double operator()(Rng& rng) const;

 private:
  const ModelParams* params_;
  const Environment* env_;
  double q_;
};

struct AnnealedMoments {
  double mean = 0.0;              // E[G_n(z_f)] (independent of z_f)
  double variance = 0.0;          // V[G_n(z_f)]
  double variance_at_zero = 0.0;  // V[G_n(0)]
  double variance_diff = 0.0;     // V[G_n(z_f)] - V[G_n(0)]
  double second_root = 0.0;       // nonzero root of variance_diff as a function of z_f
};

AnnealedMoments moments_annealed(const ModelParams& params);

// Conditional moments given one environment.
//
// mean_diff follows the almost-sure identities (R: z_f (W_f - E[W]); Z: 0).
// mean_diff_exact is the finite-n conditional difference, which replaces E[W]
// by the copy-number weighted average of the environment's rates (R) or picks
// up the factor 1 - sum_j Z_j / n_M (Z). Both converge to the same limit.
// The variance difference is exact in both cases.
struct ConditionalMoments {
  double mean = 0.0;  // E^env[G_n(z_f)]
  double variance = 0.0;
  double mean_at_zero = 0.0;
  double variance_at_zero = 0.0;
  double mean_diff = 0.0;
  double mean_diff_exact = 0.0;
  double variance_diff = 0.0;
  double second_root = 0.0;
};

ConditionalMoments moments_quenched_R(const ModelParams& params, const Environment& env);
ConditionalMoments moments_quenched_Z(const ModelParams& params, const Environment& env);

enum class Regime { Annealed, QuenchedR, QuenchedZ };
std::string to_string(Regime regime);
Regime regime_from_string(const std::string& s);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// mean +- Phi^{-1}((1 + coverage)/2) * sd under a normal approximation of G_n(z_f).
// Quenched regimes require an environment of the matching kind.
Interval normal_interval(const ModelParams& params, double z_f, double coverage, Regime regime,
                         const Environment* env = nullptr);

}  // namespace ldp
