#include "ldp/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "ldp/annealed.hpp"
#include "ldp/error.hpp"
#include "ldp/fluctuation.hpp"
#include "ldp/oracle.hpp"
#include "ldp/parallel.hpp"
#include "ldp/quenched.hpp"

namespace ldp {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Validation tolerances.
constexpr double kExactRelTol = 0.25;
constexpr double kIsSeMultiple = 3.0;
constexpr double kIsRelSlack = 0.10;
constexpr double kAgreementTol = 1e-9;

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

EnvironmentKind env_kind(Regime r) {
  return r == Regime::QuenchedZ ? EnvironmentKind::Z : EnvironmentKind::R;
}

CurveRow row_from_estimate(const ActivationEstimate& est, Regime regime, double z_f, double a) {
  CurveRow row;
  row.regime = regime;
  row.z_f = z_f;
  row.a = a;
  row.probability = est.value;
  row.log_probability = est.log_value;
  row.raw_probability = est.raw_value;
  row.rate = est.tilt.rate;
  row.theta = est.tilt.theta;
  row.sigma2 = est.tilt.sigma2;
  row.reliable = est.reliable;
  row.warnings = est.warnings;
  if (est.env_hash) row.env_hash = est.env_hash;
  return row;
}

CurveRow invalid_row(const Error& e, Regime regime, double z_f, double a) {
  CurveRow row;
  row.regime = regime;
  row.z_f = z_f;
  row.a = a;
  row.probability = row.log_probability = row.raw_probability = kNaN;
  row.rate = row.theta = row.sigma2 = kNaN;
  row.reliable = false;
  row.status = e.code();
  return row;
}

// Per-point failures (below-mean, saturation, convergence) become invalid
// rows; schema problems propagate.
template <class F>
CurveRow guarded(F&& f, Regime regime, double z_f, double a) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    return invalid_row(e, regime, z_f, a);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << content;
  if (!out) throw SchemaError("failed writing " + path.string());
}

std::string csv_matrix(const std::vector<double>& labels, const Matrix& m) {
  std::string out = "a";
  for (double a : labels) out += "," + format_number(a);
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += format_number(labels[i]);
    for (double v : m[i]) out += "," + format_number(v);
    out += "\n";
  }
  return out;
}

Json derived_json(const ModelParams& p) {
  const auto c = derived_constants(p);
  return {{"n", c.n}, {"n_M", c.n_M}, {"q_n", c.q_n}};
}

void check_displacements(const ModelParams& model, const std::vector<double>& z_f_list) {
  for (double z : z_f_list) derived_constants(model.with_z_f(z));
}

std::string gnuplot_script(const std::vector<double>& z_f_list, Regime regime) {
  std::string s;
  s += "# Activation curves from results.csv; run: gnuplot -p plot.gp\n";
  s += "set datafile separator ','\n";
  s += "set logscale y\n";
  s += "set xlabel 'a'\n";
  s += "set ylabel 'activation probability'\n";
  s += "set title '" + to_string(regime) + "'\n";
  s += "plot";
  for (std::size_t i = 0; i < z_f_list.size(); ++i) {
    const std::string z = format_number(z_f_list[i]);
    s += i ? ", \\\n    " : " ";
    s += "'results.csv' skip 1 using 5:($4==" + z + " ? $6 : 1/0) with linespoints title 'z_f=" +
         z + "'";
  }
  s += "\n";
  return s;
}

// Mean and sample standard deviation of the finite entries.
std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  double sum = 0.0;
  int k = 0;
  for (double x : xs)
    if (std::isfinite(x)) {
      sum += x;
      ++k;
    }
  if (k == 0) return {kNaN, kNaN};
  const double mean = sum / k;
  double ss = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) ss += (x - mean) * (x - mean);
  return {mean, k > 1 ? std::sqrt(ss / (k - 1)) : kNaN};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<CurveRow> compute_curve(const ModelParams& model, Regime regime,
                                    const std::vector<double>& z_f_list,
                                    const std::vector<double>& a_grid,
                                    const std::vector<Environment>& envs) {
  if (a_grid.empty()) throw SchemaError("a_grid must not be empty");
  if (z_f_list.empty()) throw SchemaError("z_f_list must not be empty");
  check_displacements(model, z_f_list);
  const std::size_t na = a_grid.size();

  if (regime == Regime::Annealed) {
    std::vector<CurveRow> rows(z_f_list.size() * na);
    std::vector<AnnealedAssembly> assemblies;
    for (double z : z_f_list) assemblies.push_back(assemble_annealed(model.with_z_f(z)));
    parallel_for(rows.size(), [&](std::size_t k) {
      const std::size_t zi = k / na;
      const double z = z_f_list[zi], a = a_grid[k % na];
      rows[k] = guarded(
          [&] {
            const auto& asm_ = assemblies[zi];
            auto est = sharp_estimate(solve_tilt(asm_.cumulant, a), asm_.n);
            if (asm_.lattice) est.warnings.push_back("lattice");
            return row_from_estimate(est, regime, z, a);
          },
          regime, z, a);
    });
    return rows;
  }

  if (envs.empty()) throw SchemaError("quenched curve needs at least one environment");
  const auto kind = env_kind(regime);
  for (const auto& env : envs) {
    if (env.kind != kind) throw SchemaError("environment kind does not match the regime");
    check_environment(model, env);
  }
  std::vector<std::shared_ptr<const QuenchedBackground>> backgrounds;
  for (double z : z_f_list)
    backgrounds.push_back(std::make_shared<QuenchedBackground>(model.with_z_f(z), kind));

  // Task = (z_f, environment); rows laid out env-major, then z_f, then a.
  const std::size_t nz = z_f_list.size();
  std::vector<CurveRow> rows(envs.size() * nz * na);
  parallel_for(envs.size() * nz, [&](std::size_t task) {
    const std::size_t ei = task / nz, zi = task % nz;
    const double z = z_f_list[zi];
    const auto assembly = assemble_quenched(backgrounds[zi], envs[ei]);
    for (std::size_t ai = 0; ai < na; ++ai) {
      const double a = a_grid[ai];
      CurveRow row = guarded(
          [&] { return row_from_estimate(probability_quenched(assembly, a), regime, z, a); },
          regime, z, a);
      row.env_index = static_cast<int>(ei);
      row.env_hash = assembly.env_hash;
      rows[(ei * nz + zi) * na + ai] = std::move(row);
    }
  });
  return rows;
}

std::string format_curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = std::string(kCurveColumns) + "\n";
  for (const auto& r : rows) {
    out += to_string(r.regime);
    out += "," + std::to_string(r.env_index);
    out += "," + (r.env_hash ? hex64(*r.env_hash) : std::string());
    for (double v : {r.z_f, r.a, r.probability, r.log_probability, r.raw_probability, r.rate,
                     r.theta, r.sigma2})
      out += "," + format_number(v);
    out += r.reliable ? ",1" : ",0";
    out += "," + r.status;
    out += "," + join(r.warnings, ';');
    out += "\n";
  }
  return out;
}

std::vector<Environment> experiment_environments(const ExperimentConfig& config, int count) {
  if (config.environment) {
    check_environment(config.model, *config.environment);
    return {*config.environment};
  }
  const auto kind = env_kind(config.regime);
  std::vector<Environment> envs(static_cast<std::size_t>(count));
  parallel_for(envs.size(), [&](std::size_t r) {
    Rng rng = Rng::substream(config.seed, r);
    envs[r] = sample_environment(config.model, kind, rng);
  });
  return envs;
}

namespace {

Json validation_row(const ValidationInstance& inst, const Environment* env, double a,
                    std::uint64_t oracle_seed, long long draws) {
  const ModelParams& p = inst.model;
  Json row = {{"a", a}};
  ActivationEstimate est;
  try {
    est = env ? probability_quenched(p, *env, a) : probability_annealed(p, a);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    row["status"] = e.code();
    row["pass"] = nullptr;
    return row;
  }
  const int n = p.n();
  const double strength = est.tilt.theta * std::sqrt(static_cast<double>(n));
  row["status"] = "ok";
  row["approximation"] = est.value;
  row["log_approximation"] = est.log_value;
  row["theta"] = est.tilt.theta;
  row["theta_sqrt_n"] = strength;
  row["warnings"] = est.warnings;

  OracleEstimate oracle;
  try {
    oracle = exact_tail(p, env, a);
  } catch (const DomainError&) {
    oracle = tilted_is(p, env, a, draws, oracle_seed);
  }
  row["oracle"] = {{"method", oracle.method}, {"value", oracle.value},
                   {"std_error", oracle.std_error}, {"draws", oracle.draws},
                   {"seed", oracle.seed}, {"states", oracle.states}};
  const double rel = oracle.value > 0.0 ? est.value / oracle.value - 1.0 : kNaN;
  row["relative_error"] = rel;
  Json pass;
  if (oracle.method == "exact") {
    row["criterion"] = "exact: |approx/exact - 1| <= 0.25 when theta sqrt(n) >= 3";
    row["gated"] = strength < kWeakTiltThreshold;
    if (strength >= kWeakTiltThreshold) pass = std::isfinite(rel) && std::abs(rel) <= kExactRelTol;
  } else {
    row["criterion"] = "tilted-is: |approx - is| <= 3 se + 0.1 is";
    row["gated"] = false;
    pass = std::abs(est.value - oracle.value) <=
           kIsSeMultiple * oracle.std_error + kIsRelSlack * oracle.value;
  }

  if (inst.compare_annealed && env != nullptr) {
    Json cmp;
    try {
      const auto ann = probability_annealed(p, a);
      const double dev = std::abs(est.value / ann.value - 1.0);
      cmp = {{"annealed", ann.value}, {"relative_deviation", dev},
             {"pass", dev <= kAgreementTol}};
      if (pass.is_boolean()) pass = pass.get<bool>() && dev <= kAgreementTol;
      else pass = dev <= kAgreementTol;
    } catch (const DomainError& e) {
      cmp = {{"status", e.code()}, {"pass", false}};
      pass = false;
    }
    row["annealed_agreement"] = cmp;
  }
  row["pass"] = pass;
  return row;
}

}  // namespace

Json validation_report(const ExperimentConfig& config) {
  if (config.corpus.empty()) throw SchemaError("validate needs a non-empty corpus");
  // Flatten (instance, a) so the pool sees every point.
  struct Task {
    std::size_t inst;
    std::size_t point;
  };
  std::vector<Task> tasks;
  std::vector<std::optional<Environment>> envs(config.corpus.size());
  for (std::size_t i = 0; i < config.corpus.size(); ++i) {
    const auto& inst = config.corpus[i];
    derived_constants(inst.model);
    if (inst.regime != Regime::Annealed) {
      if (inst.environment) {
        envs[i] = inst.environment;
      } else {
        Rng rng = Rng::substream(config.seed, i);
        envs[i] = sample_environment(inst.model, env_kind(inst.regime), rng);
      }
      if (envs[i]->kind != env_kind(inst.regime))
        throw SchemaError("corpus entry " + inst.name + ": environment kind does not match regime");
      check_environment(inst.model, *envs[i]);
    }
    for (std::size_t k = 0; k < inst.a_grid.size(); ++k) tasks.push_back({i, k});
  }
  std::vector<Json> rows(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const auto& [i, k] = tasks[t];
    const auto& inst = config.corpus[i];
    const std::uint64_t oracle_seed = substream_seed(substream_seed(config.seed, i), k);
    rows[t] = validation_row(inst, envs[i] ? &*envs[i] : nullptr, inst.a_grid[k], oracle_seed,
                             config.draws);
  });

  Json instances = Json::array();
  int passed = 0, failed = 0, informational = 0, errors = 0;
  std::size_t t = 0;
  for (std::size_t i = 0; i < config.corpus.size(); ++i) {
    const auto& inst = config.corpus[i];
    Json jr = Json::array();
    for (std::size_t k = 0; k < inst.a_grid.size(); ++k, ++t) {
      const Json& r = rows[t];
      if (r["status"] != "ok") ++errors;
      else if (r["pass"].is_null()) ++informational;
      else if (r["pass"].get<bool>()) ++passed;
      else ++failed;
      jr.push_back(r);
    }
    Json ji = {{"name", inst.name}, {"regime", to_string(inst.regime)},
               {"model", to_json(inst.model)}, {"n", inst.model.n()}, {"rows", jr}};
    if (envs[i]) {
      ji["environment_hash"] = hex64(environment_hash(*envs[i]));
      ji["environment_seed"] = envs[i]->seed;
      ji["environment"] = to_json(*envs[i]);
    }
    instances.push_back(ji);
  }
  return {{"version", kVersion},
          {"seed", config.seed},
          {"draws", config.draws},
          {"tolerances",
           {{"exact_relative", kExactRelTol}, {"weak_tilt_threshold", kWeakTiltThreshold},
            {"is_se_multiple", kIsSeMultiple}, {"is_relative_slack", kIsRelSlack},
            {"annealed_agreement", kAgreementTol}}},
          {"instances", instances},
          {"totals",
           {{"passed", passed}, {"failed", failed}, {"informational", informational},
            {"errors", errors}}},
          {"all_passed", failed == 0}};
}

RunOutcome run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw SchemaError("cannot create output_dir " + config.output_dir + ": " + ec.message());

  RunOutcome out;
  Json diagnostics = Json::object();
  int rows_total = 0, rows_ok = 0;

  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    out.files.push_back(name);
  };

  switch (config.experiment) {
    case ExperimentKind::Curve:
    case ExperimentKind::QuenchedEnsemble: {
      std::vector<Environment> envs;
      if (config.regime != Regime::Annealed) {
        const int count = config.experiment == ExperimentKind::Curve ? 1 : config.replicas;
        check_displacements(config.model, config.z_f_list);
        envs = experiment_environments(config, count);
      }
      const auto rows = compute_curve(config.model, config.regime, config.z_f_list, config.a_grid, envs);
      for (const auto& r : rows) rows_ok += r.status == "ok";
      rows_total = static_cast<int>(rows.size());
      emit("results.csv", format_curve_csv(rows));
      if (config.experiment == ExperimentKind::QuenchedEnsemble) {
        // Spread of n * rate and log probability across environments.
        const std::size_t nz = config.z_f_list.size(), na = config.a_grid.size();
        const double n = config.model.n();
        Json points = Json::array();
        for (std::size_t zi = 0; zi < nz; ++zi)
          for (std::size_t ai = 0; ai < na; ++ai) {
            std::vector<double> nrate, logp;
            int ok = 0;
            for (std::size_t e = 0; e < envs.size(); ++e) {
              const auto& r = rows[(e * nz + zi) * na + ai];
              if (r.status != "ok") continue;
              ++ok;
              nrate.push_back(n * r.rate);
              logp.push_back(r.log_probability);
            }
            const auto [mr, sr] = mean_sd(nrate);
            const auto [ml, sl] = mean_sd(logp);
            points.push_back({{"z_f", config.z_f_list[zi]}, {"a", config.a_grid[ai]},
                              {"environments_ok", ok}, {"mean_n_rate", mr}, {"sd_n_rate", sr},
                              {"mean_log_probability", ml}, {"sd_log_probability", sl}});
          }
        diagnostics["ensemble"] = points;
        diagnostics["environments"] = static_cast<int>(envs.size());
      }
      if (config.gnuplot) emit("plot.gp", gnuplot_script(config.z_f_list, config.regime));
      break;
    }
    case ExperimentKind::Moments: {
      check_displacements(config.model, config.z_f_list);
      std::vector<Environment> envs;
      if (config.regime != Regime::Annealed)
        envs = experiment_environments(config, std::max(1, config.replicas));
      std::string csv =
          "regime,env_index,env_hash,z_f,mean,variance,mean_at_zero,variance_at_zero,mean_diff,"
          "mean_diff_exact,variance_diff,second_root,interval_lo,interval_hi,coverage\n";
      auto line = [&](int ei, const std::string& hash, double z, const std::vector<double>& v,
                      const Interval& iv) {
        csv += to_string(config.regime) + "," + std::to_string(ei) + "," + hash + "," + format_number(z);
        for (double x : v) csv += "," + format_number(x);
        csv += "," + format_number(iv.lo) + "," + format_number(iv.hi) + "," +
               format_number(config.coverage) + "\n";
        ++rows_total;
        ++rows_ok;
      };
      if (config.regime == Regime::Annealed) {
        for (double z : config.z_f_list) {
          const auto p = config.model.with_z_f(z);
          const auto m = moments_annealed(p);
          const auto m0 = moments_annealed(p.with_z_f(0.0));
          line(-1, "", z,
               {m.mean, m.variance, m0.mean, m.variance_at_zero, m.mean - m0.mean, m.mean - m0.mean,
                m.variance_diff, m.second_root},
               normal_interval(config.model, z, config.coverage, config.regime));
        }
      } else {
        for (std::size_t e = 0; e < envs.size(); ++e)
          for (double z : config.z_f_list) {
            const auto p = config.model.with_z_f(z);
            const auto m = config.regime == Regime::QuenchedR ? moments_quenched_R(p, envs[e])
                                                              : moments_quenched_Z(p, envs[e]);
            line(static_cast<int>(e), hex64(environment_hash(envs[e])), z,
                 {m.mean, m.variance, m.mean_at_zero, m.variance_at_zero, m.mean_diff,
                  m.mean_diff_exact, m.variance_diff, m.second_root},
                 normal_interval(config.model, z, config.coverage, config.regime, &envs[e]));
          }
      }
      emit("results.csv", csv);
      break;
    }
    case ExperimentKind::Fluctuation: {
      if (config.z_f_list.size() != 1)
        throw SchemaError("fluctuation takes a single z_f (model.z_f or a one-entry z_f_list)");
      const auto params = config.model.with_z_f(config.z_f_list.front());
      derived_constants(params);
      const auto rep = simulate_fluctuation(params, env_kind(config.regime), config.a_grid,
                                            config.replicas, config.seed);
      const std::size_t m = rep.a_grid.size();
      std::string csv = "a,t,empirical_mean,empirical_var,predicted_var,jackknife_se_var,normality_p\n";
      for (std::size_t i = 0; i < m; ++i) {
        csv += format_number(rep.a_grid[i]) + "," + format_number(rep.t_grid[i]) + "," +
               format_number(rep.empirical_mean[i]) + "," + format_number(rep.empirical_cov[i][i]) +
               "," + format_number(rep.predicted_cov[i][i]) + "," +
               format_number(rep.jackknife_se[i][i]) + "," + format_number(rep.normality_pvalues[i]) +
               "\n";
      }
      rows_total = static_cast<int>(config.a_grid.size());
      rows_ok = static_cast<int>(m);
      emit("results.csv", csv);
      Json invalid = Json::array();
      for (const auto& ip : rep.invalid_points)
        invalid.push_back({{"a", ip.a}, {"code", ip.code}, {"message", ip.message}});
      Json fj = {{"kind", to_string(rep.kind)},
                 {"n", rep.n},
                 {"replicas", rep.replicas},
                 {"seed", rep.seed},
                 {"a_grid", rep.a_grid},
                 {"t_grid", rep.t_grid},
                 {"empirical_mean", rep.empirical_mean},
                 {"empirical_cov", rep.empirical_cov},
                 {"predicted_cov", rep.predicted_cov},
                 {"jackknife_se", rep.jackknife_se},
                 {"max_abs_cov_error", rep.max_abs_cov_error},
                 {"max_cov_zscore", rep.max_cov_zscore},
                 {"normality_pvalues", rep.normality_pvalues},
                 {"min_eigen_empirical", rep.min_eigen_empirical},
                 {"min_eigen_predicted", rep.min_eigen_predicted},
                 {"invalid_points", invalid}};
      emit("fluctuation.json", fj.dump(2) + "\n");
      emit("cov_empirical.csv", csv_matrix(rep.a_grid, rep.empirical_cov));
      emit("cov_predicted.csv", csv_matrix(rep.a_grid, rep.predicted_cov));
      diagnostics["max_cov_zscore"] = rep.max_cov_zscore;
      diagnostics["max_abs_cov_error"] = rep.max_abs_cov_error;
      diagnostics["min_eigen_empirical"] = rep.min_eigen_empirical;
      break;
    }
    case ExperimentKind::Validate: {
      const Json report = validation_report(config);
      emit("validation.json", report.dump(2) + "\n");
      const auto& tot = report["totals"];
      rows_total = tot["passed"].get<int>() + tot["failed"].get<int>() +
                   tot["informational"].get<int>() + tot["errors"].get<int>();
      rows_ok = rows_total - tot["errors"].get<int>();
      diagnostics["totals"] = tot;
      diagnostics["all_passed"] = report["all_passed"];
      if (!report["all_passed"].get<bool>()) out.exit_code = 1;
      break;
    }
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json summary = {{"version", kVersion},
                  {"experiment", to_string(config.experiment)},
                  {"config_hash", hex64(config.config_hash)},
                  {"seed", config.seed},
                  {"output_files", out.files},
                  {"counts", {{"rows", rows_total}, {"ok", rows_ok}, {"invalid", rows_total - rows_ok}}},
                  {"diagnostics", diagnostics},
                  {"timing", {{"wall_seconds", wall}}}};
  if (config.experiment != ExperimentKind::Validate) {
    summary["regime"] = to_string(config.regime);
    summary["model"] = to_json(config.model);
    summary["derived"] = derived_json(config.model);
    summary["z_f_list"] = config.z_f_list;
    summary["a_grid"] = config.a_grid;
  }
  summary["output_files"].push_back("summary.json");
  out.files.push_back("summary.json");
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  out.summary = std::move(summary);
  return out;
}

}  // namespace ldp
