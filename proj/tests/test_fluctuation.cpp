#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ldp/error.hpp"
#include "ldp/fluctuation.hpp"
#include "ldp/quenched.hpp"

using namespace ldp;
using namespace testing_support;

TEST_CASE("degenerate conditioning law gives no fluctuation") {
  auto p = mixed_model(30, 40, 0.0);
  p.law_w = BoundedDistribution::degenerate(0.5);
  const QuenchedBackground bg(p, EnvironmentKind::R);
  const double m = bg.g(0.0).dpsi;
  const auto r = simulate_fluctuation(p, EnvironmentKind::R, {1.2 * m, 1.5 * m}, 150, 1);
  REQUIRE(r.a_grid.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(r.empirical_cov[i][j] == 0.0);
      CHECK(r.predicted_cov[i][j] == 0.0);
    }
    CHECK(std::isnan(r.normality_pvalues[i]));
  }
}

TEST_CASE("empirical covariance matches the prediction") {
  for (auto kind : {EnvironmentKind::R, EnvironmentKind::Z}) {
    const auto p = beta_model(60, 89, kind == EnvironmentKind::R ? 0.0 : 4.0);
    const QuenchedBackground bg(p, kind);
    const double m = bg.deterministic_cumulant(p.law_w.mean()).dpsi(0.0);
    const auto r = simulate_fluctuation(p, kind, {1.3 * m}, 2000, 7);
    const double emp = r.empirical_cov[0][0], pred = r.predicted_cov[0][0];
    // Relative standard error of a variance estimate from R replicas.
    const double rel_se = std::sqrt(2.0 / (r.replicas - 1));
    CHECK(std::abs(emp / pred - 1.0) <= 5 * rel_se);
    CHECK(std::abs(emp - pred) <= 5 * r.jackknife_se[0][0]);
  }
}

TEST_CASE("report structure") {
  const auto p = beta_model(40, 59, 0.0);
  const QuenchedBackground bg(p, EnvironmentKind::R);
  const double m = bg.g(0.0).dpsi;
  const double top = bg.g(400.0).dpsi;
  const auto r = simulate_fluctuation(p, EnvironmentKind::R, {0.5 * m, 1.2 * m, 1.5 * m, 1.9 * m, 2.0 * top}, 300, 3);
  CHECK(r.a_grid.size() == 3);
  REQUIRE(r.invalid_points.size() == 2);
  CHECK(r.invalid_points[0].code == "below-mean");
  CHECK(r.invalid_points[1].code == "saturation");
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(r.empirical_cov[i][j] == r.empirical_cov[j][i]);
      CHECK(r.predicted_cov[i][j] == r.predicted_cov[j][i]);
    }
  CHECK(r.min_eigen_empirical >= -1e-10);
  CHECK(r.min_eigen_predicted >= -1e-10);
  CHECK(r.samples.size() == 300);
  CHECK_THROWS_AS(simulate_fluctuation(p, EnvironmentKind::R, {1.2 * m}, 50, 1), SchemaError);
  CHECK_THROWS_AS(simulate_fluctuation(p, EnvironmentKind::R, {}, 200, 1), SchemaError);

  const auto again = simulate_fluctuation(p, EnvironmentKind::R, {1.2 * m, 1.5 * m, 1.9 * m}, 300, 3);
  CHECK(again.empirical_cov == r.empirical_cov);
}

TEST_CASE("normality diagnostic") {
  CHECK_THROWS_AS(normality_diagnostic(std::vector<double>(99, 0.5)), DomainError);
  CHECK_THROWS_AS(normality_diagnostic(std::vector<double>(500, 0.5)), DomainError);
}
