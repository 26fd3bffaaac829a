#include <cmath>
#include <vector>

#include "doctest.h"
#include "ldp/distributions.hpp"
#include "ldp/error.hpp"
#include "ldp/tilt.hpp"

using namespace ldp;

namespace {

CumulantFunction bernoulli() {
  return CumulantFunction(
      [](double t) { return std::log(0.5 * (1.0 + std::exp(t))); },
      [](double t) { return 1.0 / (1.0 + std::exp(-t)); },
      [](double t) {
        const double p = 1.0 / (1.0 + std::exp(-t));
        return p * (1.0 - p);
      });
}

CumulantFunction from_law(const BoundedDistribution& d) {
  return CumulantFunction([d](double t) {
    const auto k = d.cumulants(t);
    return CumulantValues{k.value, k.d1, k.d2};
  });
}

}  // namespace

TEST_CASE("Bernoulli closed form") {
  const auto sol = solve_tilt(bernoulli(), 0.75);
  CHECK(std::abs(sol.theta - std::log(3.0)) <= 1e-9);
  const double kl = 0.75 * std::log(3.0) - std::log(2.0);
  CHECK(std::abs(sol.rate - kl) <= 1e-9);
  CHECK(kl == doctest::Approx(0.13081).epsilon(1e-4));
  CHECK(sol.sigma2 == doctest::Approx(0.1875).epsilon(1e-9));
  CHECK(std::abs(legendre_value(bernoulli(), 0.75, std::log(3.0)) - kl) <= 1e-12);
  CHECK(legendre_value(bernoulli(), 0.3, 0.0) == 0.0);
}

TEST_CASE("near-mean limit and errors") {
  const auto sol = solve_tilt(bernoulli(), 0.5 + 1e-7);
  CHECK(sol.theta < 1e-5);
  CHECK(sol.rate < 1e-12);
  CHECK_THROWS_AS(solve_tilt(bernoulli(), 0.5), BelowMeanError);
  CHECK_THROWS_AS(solve_tilt(bernoulli(), 0.2), BelowMeanError);
  try {
    solve_tilt(bernoulli(), 1.0);
    FAIL("saturation not detected");
  } catch (const SaturationError& e) {
    CHECK(e.plateau() <= 1.0);
    CHECK(e.code() == "saturation");
  }
  const auto deg = from_law(BoundedDistribution::degenerate(2.0));
  CHECK_THROWS_AS(solve_tilt(deg, 2.5), SaturationError);
  CHECK_THROWS_AS(solve_tilt(deg, 2.0), BelowMeanError);
}

TEST_CASE("rate function properties") {
  const auto law = BoundedDistribution::discrete({0.0, 0.4, 1.1, 2.0}, {0.3, 0.3, 0.3, 0.1});
  const auto c = from_law(law);
  const double mean = law.mean();
  std::vector<double> grid, rates, thetas;
  for (double a = mean + 0.02; a < 1.95; a += 0.05) {
    grid.push_back(a);
    const auto s = solve_tilt(c, a);
    CHECK(std::abs(c.dpsi(s.theta) - a) <= 1e-10 * std::max(1.0, a));
    CHECK(s.rate >= 0.0);
    CHECK(s.sigma2 == c.d2psi(s.theta));
    rates.push_back(s.rate);
    thetas.push_back(s.theta);
    // Supremum property.
    for (double t : {0.0, 0.5 * s.theta, 1.5 * s.theta, s.theta + 1.0})
      CHECK(legendre_value(c, a, t) <= s.rate + 1e-12);
    // Hint invariance.
    for (double h : {0.01, 0.5 * s.theta, 2.0 * s.theta + 0.1, 49.0}) {
      const auto sh = solve_tilt(c, a, h);
      CHECK(std::abs(sh.theta - s.theta) <= 10 * 1e-10 * std::max(1.0, s.theta) / std::max(1e-3, s.sigma2));
    }
  }
  for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] > rates[i - 1]);
  for (std::size_t i = 1; i + 1 < rates.size(); ++i) {
    const double lam = (grid[i] - grid[i - 1]) / (grid[i + 1] - grid[i - 1]);
    CHECK(rates[i] <= (1 - lam) * rates[i - 1] + lam * rates[i + 1] + 1e-9);
  }
}

TEST_CASE("bracket expansion") {
  // Plateau only approached for theta well beyond 50.
  const auto law = BoundedDistribution::discrete({0.0, 1.0, 1.01}, {0.5, 0.49, 0.01});
  const auto c = from_law(law);
  const double a = c.dpsi(120.0);
  const auto s = solve_tilt(c, a);
  CHECK(s.theta == doctest::Approx(120.0).epsilon(1e-6));
}
