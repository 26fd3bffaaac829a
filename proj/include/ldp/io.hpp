#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldp/distributions.hpp"
#include "ldp/model.hpp"

namespace ldp {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

BoundedDistribution distribution_from_json(const Json& j);
Json to_json(const BoundedDistribution& d);

// Model object: n_c, n_v, z_f, law_Zc, law_Zv, law_W, optional a and seed.
ModelParams model_from_json(const Json& j);
Json to_json(const ModelParams& p);

Environment environment_from_json(const Json& j);
Json to_json(const Environment& env);

enum class ExperimentKind { Curve, QuenchedEnsemble, Moments, Fluctuation, Validate };
std::string to_string(ExperimentKind k);

// One entry of a validation corpus.
struct ValidationInstance {
  std::string name;
  ModelParams model;
  Regime regime = Regime::Annealed;
  std::vector<double> a_grid;
  std::optional<Environment> environment;
  bool compare_annealed = false;  // expect quenched == annealed to 1e-9
};

struct ExperimentConfig {
  ModelParams model;
  ExperimentKind experiment = ExperimentKind::Curve;
  Regime regime = Regime::Annealed;
  std::vector<double> a_grid;
  std::vector<double> z_f_list;
  int replicas = 0;
  long long draws = 0;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  double coverage = 0.99;
  bool gnuplot = false;
  std::optional<Environment> environment;
  std::vector<ValidationInstance> corpus;
  std::uint64_t config_hash = 0;  // FNV-1a of the canonical JSON dump, output_dir excluded
};

// Throws SchemaError on any structural problem.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

// JSON schema of the config file.
const Json& config_schema();
const Json& summary_schema();

std::string hex64(std::uint64_t v);

}  // namespace ldp
