#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldp/io.hpp"

namespace ldp {

// One row of an activation curve. Invalid points keep their (z_f, a) and carry
// the error code in status; their numeric fields are NaN.
struct CurveRow {
  Regime regime = Regime::Annealed;
  int env_index = -1;  // -1 for annealed rows
  std::optional<std::uint64_t> env_hash;
  double z_f = 0.0;
  double a = 0.0;
  double probability = 0.0;
  double log_probability = 0.0;
  double raw_probability = 0.0;
  double rate = 0.0;
  double theta = 0.0;
  double sigma2 = 0.0;
  bool reliable = false;
  std::string status = "ok";
  std::vector<std::string> warnings;
};

inline constexpr const char* kCurveColumns =
    "regime,env_index,env_hash,z_f,a,probability,log_probability,raw_probability,rate,theta,"
    "sigma2,reliable,status,warnings";

// Curve rows for one model over the config grids, ordered z_f-major then a.
// Quenched regimes use one environment per entry of envs.
std::vector<CurveRow> compute_curve(const ModelParams& model, Regime regime,
                                    const std::vector<double>& z_f_list,
                                    const std::vector<double>& a_grid,
                                    const std::vector<Environment>& envs = {});

std::string format_curve_csv(const std::vector<CurveRow>& rows);

// Environments used by a quenched experiment: the configured one, or
// count draws with environment r from substream(seed, r).
std::vector<Environment> experiment_environments(const ExperimentConfig& config, int count);

// Validation corpus evaluation (no files written).
Json validation_report(const ExperimentConfig& config);

struct RunOutcome {
  int exit_code = 0;  // 0, or 1 when a validation row failed its tolerance
  std::vector<std::string> files;
  Json summary;
};

// Runs the configured experiment and writes its artifacts to output_dir.
// Throws ldp::Error on schema, domain and numeric failures.
RunOutcome run_experiment(const ExperimentConfig& config);

// %.17g, or "nan"/"inf"/"-inf".
std::string format_number(double v);

}  // namespace ldp
