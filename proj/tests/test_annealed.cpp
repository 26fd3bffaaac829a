#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ldp/annealed.hpp"
#include "ldp/error.hpp"

using namespace ldp;
using namespace testing_support;

TEST_CASE("assembly identities") {
  for (double z : {0.0, 3.0, 10.0}) {
    const auto p = mixed_model(20, 30, z);
    const auto a = assemble_annealed(p);
    const auto m = moments_annealed(p);
    const auto v0 = a.cumulant(0.0);
    CHECK(v0.psi == 0.0);
    CHECK(std::abs(v0.dpsi * a.n - m.mean) <= 1e-9 * m.mean);
    CHECK(std::abs(v0.d2psi - m.variance / a.n) <= 1e-9 * m.variance / a.n);
  }
  const auto p = mixed_model(20, 30, 0.0);
  const auto a = assemble_annealed(p);
  const double n = p.n();
  for (double t : {0.3, 1.7}) {
    // Independent product MGF: E_Z[M_W(t Z)].
    auto mgf = [&](const BoundedDistribution& z) {
      double s = 0.0;
      for (std::size_t i = 0; i < z.points().size(); ++i)
        s += z.weights()[i] * std::exp(p.law_w.log_mgf(t * z.points()[i]));
      return std::log(s);
    };
    const double direct = (p.n_c / n) * mgf(p.law_zc) + (p.n_v / n) * mgf(p.law_zv);
    CHECK(a.cumulant.psi(t) == doctest::Approx(direct).epsilon(1e-12));
  }
  const auto b = assemble_annealed(beta_model(5, 5, 2.0));
  CHECK_FALSE(b.lattice);
  CHECK(assemble_annealed(bernoulli_model(20)).lattice);
}

TEST_CASE("rate converges to the Bernoulli divergence") {
  const double kl = 0.75 * std::log(3.0) - std::log(2.0);
  double prev = INFINITY;
  for (int n : {50, 200, 800, 3200}) {
    const double r = rate_annealed(bernoulli_model(n), 0.75).rate;
    const double err = std::abs(r - kl);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("probability: monotone, warnings and lattice limit") {
  const auto p = mixed_model(40, 60, 5.0);
  const double mean = moments_annealed(p).mean / p.n();
  double prev = 2.0;
  std::vector<double> grid;
  for (double a = mean * 1.05; a < mean * 2.5; a += mean * 0.1) grid.push_back(a);
  double prev_rate = -1.0;
  for (double a : grid) {
    const auto e = probability_annealed(p, a);
    CHECK(e.value <= prev);
    CHECK(e.tilt.rate >= prev_rate);
    prev = e.value;
    prev_rate = e.tilt.rate;
    CHECK(std::isfinite(e.log_value));
  }
  const auto near = probability_annealed(p, mean * 1.0001);
  CHECK_FALSE(near.reliable);
  bool weak = false;
  for (const auto& w : near.warnings) weak = weak || w == "weak-tilt";
  CHECK(weak);
  CHECK(near.value <= 1.0);
  if (near.raw_value > 1.0) CHECK(near.clamped);
  CHECK_THROWS_AS(probability_annealed(p, mean * 0.9), BelowMeanError);

  // On the lattice Bernoulli family the non-lattice prefactor is off by the
  // factor (1 - e^{-theta}) / theta in the limit.
  for (int n : {400, 1600}) {
    const auto e = probability_annealed(bernoulli_model(n), 0.75);
    const double exact = binomial_half_tail(n - 1, static_cast<int>(std::ceil(0.75 * n - 1e-9)));
    const double th = e.tilt.theta;
    CHECK(e.value / exact == doctest::Approx((1.0 - std::exp(-th)) / th).epsilon(0.01));
  }
}

TEST_CASE("annealed ratio") {
  const auto p = mixed_model(40, 60, 0.0);
  const auto c = derived_constants(p);
  const double L = p.law_w.upper();
  const double cutoff = L * c.n_M / c.n;
  CHECK(ratio_annealed(p, 0.5 * cutoff, 0.0).value == 1.0);
  const double mean = moments_annealed(p).mean / c.n;
  const double a_lo = mean + 0.3 * (cutoff - mean);
  REQUIRE(a_lo < cutoff);
  const auto r1 = ratio_annealed(p, a_lo, 30.0);
  const auto r2 = ratio_annealed(p, a_lo, 60.0);
  CHECK(r1.value > 1.0);
  CHECK(r2.value > r1.value);
  const double a_hi = std::min(cutoff * 1.1, 0.5 * (cutoff + 1.0 * c.n_M * 5 * 1.0 / c.n));
  const auto r3 = ratio_annealed(p, a_hi, 30.0);
  CHECK(r3.value < 1.0);
  CHECK_FALSE(ratio_annealed(p, a_lo, 2.0).warnings.empty());
}
