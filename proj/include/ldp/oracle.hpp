#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ldp/model.hpp"

namespace ldp {

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::string method;  // "exact", "naive-mc", "tilted-is"
  long long draws = 0;
  std::uint64_t seed = 0;
  double theta = 0.0;  // tilt used by tilted-is
  long long states = 0;  // lattice size used by exact
};

struct ExactOptions {
  double resolution = 1e-9;
  long long max_states = 10000000;
};

// P(G_n(z_f) >= a n) by convolution on a common integer lattice. Conditional
// when env is given. Refuses non-discrete laws, incommensurable supports and
// lattices larger than max_states.
OracleEstimate exact_tail(const ModelParams& params, const Environment* env, double a,
                          const ExactOptions& options = {});

// Monte Carlo draws are processed in fixed chunks, chunk c using
// Rng::substream(seed, c); the value is independent of the thread count.
inline constexpr long long kMonteCarloChunk = 4096;

OracleEstimate naive_mc(const ModelParams& params, const Environment* env, double a,
                        long long draws, std::uint64_t seed);

// Importance sampling under the product-form exponential tilt at theta_n (or
// forced_theta). Scaled-beta laws are tilted on their quadrature nodes.
OracleEstimate tilted_is(const ModelParams& params, const Environment* env, double a,
                         long long draws, std::uint64_t seed,
                         std::optional<double> forced_theta = std::nullopt);

}  // namespace ldp
