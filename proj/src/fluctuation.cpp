#include "ldp/fluctuation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <memory>

#include "ldp/error.hpp"
#include "ldp/parallel.hpp"
#include "ldp/quenched.hpp"
#include "ldp/stats.hpp"

namespace ldp {

double normality_diagnostic(std::span<const double> samples) {
  return dagostino_pearson(samples).p_value;
}

namespace {

double min_eigenvalue(const Matrix& m) {
  const auto k = static_cast<Eigen::Index>(m.size());
  if (k == 0) return 0.0;
  Eigen::MatrixXd e(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) e(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

FluctuationReport simulate_fluctuation(const ModelParams& params, EnvironmentKind kind,
                                       const std::vector<double>& a_grid, int replicas,
                                       std::uint64_t seed) {
  if (a_grid.empty()) throw SchemaError("a_grid must not be empty");
  if (replicas < 100) throw SchemaError("fluctuation needs at least 100 replicas");
  auto bg = std::make_shared<const QuenchedBackground>(params, kind);
  const double w_f = params.law_w.mean();

  FluctuationReport rep;
  rep.kind = kind;
  rep.n = bg->n();
  rep.replicas = replicas;
  rep.seed = seed;
  const auto det = bg->deterministic_cumulant(w_f);
  for (double a : a_grid) {
    try {
      if (kind == EnvironmentKind::R && a * bg->n() <= bg->z_f() * w_f)
        throw DomainError("foreign contribution reaches the threshold", "foreign-dominates");
      const double theta0 = solve_tilt(det, a).theta;
      rep.a_grid.push_back(a);
      rep.t_grid.push_back(bg->q() * theta0);
    } catch (const Error& e) {
      rep.invalid_points.push_back({a, e.code(), e.what()});
    }
  }
  const std::size_t k = rep.a_grid.size();
  if (k == 0) return rep;

  rep.samples.assign(replicas, std::vector<double>(k, 0.0));
  parallel_for(static_cast<std::size_t>(replicas), [&](std::size_t r) {
    Rng rng = Rng::substream(seed, r);
    const auto env = sample_environment(params, kind, rng);
    QuenchedAssembly qa = assemble_quenched(bg, env, false);
    for (std::size_t i = 0; i < k; ++i) rep.samples[r][i] = qa.fluctuation(rep.t_grid[i]).psi;
  });

  // Empirical moments on centered data.
  const double R = replicas;
  rep.empirical_mean.assign(k, 0.0);
  for (const auto& row : rep.samples)
    for (std::size_t i = 0; i < k; ++i) rep.empirical_mean[i] += row[i];
  for (double& m : rep.empirical_mean) m /= R;
  Matrix centered(replicas, std::vector<double>(k));
  for (int r = 0; r < replicas; ++r)
    for (std::size_t i = 0; i < k; ++i) centered[r][i] = rep.samples[r][i] - rep.empirical_mean[i];

  rep.empirical_cov.assign(k, std::vector<double>(k, 0.0));
  rep.jackknife_se.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      double sxy = 0.0, sx = 0.0, sy = 0.0;
      for (int r = 0; r < replicas; ++r) {
        sxy += centered[r][i] * centered[r][j];
        sx += centered[r][i];
        sy += centered[r][j];
      }
      const double cov = (sxy - sx * sy / R) / (R - 1.0);
      // Leave-one-out covariances.
      double jm = 0.0;
      std::vector<double> loo(replicas);
      for (int r = 0; r < replicas; ++r) {
        const double x = centered[r][i], y = centered[r][j];
        loo[r] = (sxy - x * y - (sx - x) * (sy - y) / (R - 1.0)) / (R - 2.0);
        jm += loo[r];
      }
      jm /= R;
      double jv = 0.0;
      for (double v : loo) jv += (v - jm) * (v - jm);
      const double se = std::sqrt((R - 1.0) / R * jv);
      rep.empirical_cov[i][j] = rep.empirical_cov[j][i] = cov;
      rep.jackknife_se[i][j] = rep.jackknife_se[j][i] = se;
    }
  }

  // Predicted: sum_gamma (n_gamma / n) Cov_S(L_gamma(t_i; S), L_gamma(t_j; S)).
  rep.predicted_cov.assign(k, std::vector<double>(k, 0.0));
  for (int g = 0; g < 2; ++g) {
    const auto& grp = bg->groups()[g];
    if (grp.count == 0) continue;
    const double frac = static_cast<double>(grp.count) / bg->n();
    const auto& pts = grp.outer.points();
    const auto& wts = grp.outer.weights();
    Matrix L(k, std::vector<double>(pts.size()));
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t s = 0; s < pts.size(); ++s) {
        L[i][s] = bg->peptide(g, rep.t_grid[i], pts[s]).psi;
        mean[i] += wts[s] * L[i][s];
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        double c = 0.0;
        for (std::size_t s = 0; s < pts.size(); ++s)
          c += wts[s] * (L[i][s] - mean[i]) * (L[j][s] - mean[j]);
        rep.predicted_cov[i][j] += frac * c;
        if (j != i) rep.predicted_cov[j][i] = rep.predicted_cov[i][j];
      }
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double err = std::abs(rep.empirical_cov[i][j] - rep.predicted_cov[i][j]);
      rep.max_abs_cov_error = std::max(rep.max_abs_cov_error, err);
      if (rep.jackknife_se[i][j] > 0.0)
        rep.max_cov_zscore = std::max(rep.max_cov_zscore, err / rep.jackknife_se[i][j]);
    }
  }

  rep.normality_pvalues.assign(k, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> column(replicas);
  for (std::size_t i = 0; i < k; ++i) {
    for (int r = 0; r < replicas; ++r) column[r] = rep.samples[r][i];
    try {
      rep.normality_pvalues[i] = normality_diagnostic(column);
    } catch (const DomainError&) {
      // constant column: leave NaN
    }
  }
  rep.min_eigen_empirical = min_eigenvalue(rep.empirical_cov);
  rep.min_eigen_predicted = min_eigenvalue(rep.predicted_cov);
  return rep;
}

}  // namespace ldp
