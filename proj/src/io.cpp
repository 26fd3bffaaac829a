#include "ldp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ldp/error.hpp"
#include "schemas_embedded.hpp"

namespace ldp {

namespace {

const Json& field(const Json& j, const char* key, const char* where) {
  if (!j.is_object()) throw SchemaError(std::string(where) + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string(where) + ": missing \"" + key + "\"");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(std::string(what) + " must be a number");
  return j.get<double>();
}

long long integer(const Json& j, const char* what) {
  if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
    throw SchemaError(std::string(what) + " must be an integer");
  return j.get<long long>();
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw SchemaError(std::string(where) + ": unknown key \"" + it.key() + "\"");
  }
}

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

BoundedDistribution distribution_from_json(const Json& j) {
  const auto& kind = field(j, "kind", "distribution");
  if (!kind.is_string()) throw SchemaError("distribution kind must be a string");
  const auto k = kind.get<std::string>();
  if (k == "discrete") {
    reject_unknown(j, {"kind", "support", "probs"}, "discrete distribution");
    return BoundedDistribution::discrete(numbers(field(j, "support", "discrete distribution"), "support"),
                                         numbers(field(j, "probs", "discrete distribution"), "probs"));
  }
  if (k == "degenerate") {
    reject_unknown(j, {"kind", "value"}, "degenerate distribution");
    const double v = number(field(j, "value", "degenerate distribution"), "value");
    if (!(v >= 0.0) || !std::isfinite(v)) throw SchemaError("degenerate value must be finite and >= 0");
    return BoundedDistribution::degenerate(v);
  }
  if (k == "scaled_beta") {
    reject_unknown(j, {"kind", "alpha", "beta", "max", "nodes"}, "scaled_beta distribution");
    const double alpha = number(field(j, "alpha", "scaled_beta"), "alpha");
    const double beta = number(field(j, "beta", "scaled_beta"), "beta");
    const double max = number(field(j, "max", "scaled_beta"), "max");
    int nodes = BoundedDistribution::kDefaultQuadratureNodes;
    if (j.contains("nodes")) nodes = static_cast<int>(integer(j["nodes"], "nodes"));
    return BoundedDistribution::scaled_beta(alpha, beta, max, nodes);
  }
  throw SchemaError("distribution kind must be discrete, degenerate or scaled_beta");
}

Json to_json(const BoundedDistribution& d) {
  if (d.kind() == DistributionKind::ScaledBeta)
    return {{"kind", "scaled_beta"}, {"alpha", d.alpha()}, {"beta", d.beta()}, {"max", d.upper()},
            {"nodes", d.quadrature_nodes()}};
  return {{"kind", "discrete"}, {"support", d.points()}, {"probs", d.weights()}};
}

ModelParams model_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("model must be an object");
  reject_unknown(j, {"n_c", "n_v", "z_f", "law_Zc", "law_Zv", "law_W", "a", "seed"}, "model");
  ModelParams p;
  p.n_c = static_cast<int>(integer(field(j, "n_c", "model"), "n_c"));
  p.n_v = static_cast<int>(integer(field(j, "n_v", "model"), "n_v"));
  if (p.n_c < 0 || p.n_v < 0 || p.n_c + p.n_v < 1)
    throw SchemaError("n_c and n_v must be nonnegative with n_c + n_v >= 1");
  p.z_f = j.contains("z_f") ? number(j["z_f"], "z_f") : 0.0;
  if (!(p.z_f >= 0.0)) throw SchemaError("z_f must be >= 0");
  p.law_zc = distribution_from_json(field(j, "law_Zc", "model"));
  p.law_zv = distribution_from_json(field(j, "law_Zv", "model"));
  p.law_w = distribution_from_json(field(j, "law_W", "model"));
  if (j.contains("a")) p.a = number(j["a"], "a");
  if (j.contains("seed")) p.seed = static_cast<std::uint64_t>(integer(j["seed"], "seed"));
  return p;
}

Json to_json(const ModelParams& p) {
  return {{"n_c", p.n_c}, {"n_v", p.n_v}, {"z_f", p.z_f}, {"law_Zc", to_json(p.law_zc)},
          {"law_Zv", to_json(p.law_zv)}, {"law_W", to_json(p.law_w)}, {"a", p.a}, {"seed", p.seed}};
}

Environment environment_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("environment must be an object");
  reject_unknown(j, {"kind", "values", "seed"}, "environment");
  Environment env;
  const auto& kind = field(j, "kind", "environment");
  if (!kind.is_string()) throw SchemaError("environment kind must be a string");
  env.kind = environment_kind_from_string(kind.get<std::string>());
  env.values = numbers(field(j, "values", "environment"), "values");
  if (j.contains("seed")) env.seed = static_cast<std::uint64_t>(integer(j["seed"], "seed"));
  return env;
}

Json to_json(const Environment& env) {
  return {{"kind", to_string(env.kind)}, {"values", env.values}, {"seed", env.seed}};
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Curve: return "curve";
    case ExperimentKind::QuenchedEnsemble: return "quenched-ensemble";
    case ExperimentKind::Moments: return "moments";
    case ExperimentKind::Fluctuation: return "fluctuation";
    case ExperimentKind::Validate: return "validate";
  }
  return "curve";
}

namespace {

ExperimentKind experiment_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::Curve, ExperimentKind::QuenchedEnsemble, ExperimentKind::Moments,
                 ExperimentKind::Fluctuation, ExperimentKind::Validate})
    if (to_string(k) == s) return k;
  throw SchemaError("experiment must be one of curve, quenched-ensemble, moments, fluctuation, validate");
}

Regime regime_field(const Json& j) {
  if (!j.contains("regime")) return Regime::Annealed;
  if (!j["regime"].is_string()) throw SchemaError("regime must be a string");
  return regime_from_string(j["regime"].get<std::string>());
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  reject_unknown(j, {"model", "experiment", "regime", "a_grid", "z_f_list", "replicas", "draws",
                     "seed", "output_dir", "coverage", "gnuplot", "environment", "corpus"},
                 "config");
  ExperimentConfig c;
  {
    // where the files go does not change the experiment
    Json hashed = j;
    hashed.erase("output_dir");
    c.config_hash = fnv1a(hashed.dump());
  }
  const auto& exp = field(j, "experiment", "config");
  if (!exp.is_string()) throw SchemaError("experiment must be a string");
  c.experiment = experiment_from_string(exp.get<std::string>());
  c.regime = regime_field(j);
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(integer(j["seed"], "seed"));
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw SchemaError("output_dir must be a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("replicas")) c.replicas = static_cast<int>(integer(j["replicas"], "replicas"));
  if (j.contains("draws")) c.draws = integer(j["draws"], "draws");
  if (j.contains("coverage")) c.coverage = number(j["coverage"], "coverage");
  if (j.contains("gnuplot")) {
    if (!j["gnuplot"].is_boolean()) throw SchemaError("gnuplot must be a boolean");
    c.gnuplot = j["gnuplot"].get<bool>();
  }
  if (j.contains("environment")) c.environment = environment_from_json(j["environment"]);

  if (c.experiment == ExperimentKind::Validate) {
    const auto& corpus = field(j, "corpus", "validate config");
    if (!corpus.is_array() || corpus.empty()) throw SchemaError("corpus must be a non-empty array");
    for (const auto& inst : corpus) {
      if (!inst.is_object()) throw SchemaError("corpus entries must be objects");
      reject_unknown(inst, {"name", "model", "regime", "a_grid", "environment", "compare_annealed"},
                     "corpus entry");
      ValidationInstance v;
      v.name = inst.value("name", std::string("instance-") + std::to_string(c.corpus.size()));
      v.model = model_from_json(field(inst, "model", "corpus entry"));
      v.regime = regime_field(inst);
      v.a_grid = numbers(field(inst, "a_grid", "corpus entry"), "a_grid");
      if (v.a_grid.empty()) throw SchemaError("corpus entry a_grid must not be empty");
      if (inst.contains("environment")) v.environment = environment_from_json(inst["environment"]);
      if (inst.contains("compare_annealed")) v.compare_annealed = inst["compare_annealed"].get<bool>();
      c.corpus.push_back(std::move(v));
    }
    if (c.draws <= 0) c.draws = 100000;
    return c;
  }

  c.model = model_from_json(field(j, "model", "config"));
  if (c.experiment != ExperimentKind::Moments) {
    c.a_grid = numbers(field(j, "a_grid", "config"), "a_grid");
    if (c.a_grid.empty()) throw SchemaError("a_grid must not be empty");
  }
  if (j.contains("z_f_list")) {
    c.z_f_list = numbers(j["z_f_list"], "z_f_list");
    if (c.z_f_list.empty()) throw SchemaError("z_f_list must not be empty");
    for (double z : c.z_f_list)
      if (!(z >= 0.0)) throw SchemaError("z_f_list entries must be >= 0");
  } else {
    c.z_f_list = {c.model.z_f};
  }
  if (c.experiment == ExperimentKind::QuenchedEnsemble || c.experiment == ExperimentKind::Fluctuation) {
    if (c.regime == Regime::Annealed)
      throw SchemaError(to_string(c.experiment) + " needs regime quenched-R or quenched-Z");
    if (!j.contains("replicas")) throw SchemaError(to_string(c.experiment) + " requires replicas");
    if (c.replicas < 1) throw SchemaError("replicas must be >= 1");
  }
  if (c.environment) {
    const auto want = c.regime == Regime::QuenchedR ? EnvironmentKind::R : EnvironmentKind::Z;
    if (c.regime == Regime::Annealed || c.environment->kind != want)
      throw SchemaError("environment kind does not match the regime");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

const Json& config_schema() {
  static const Json s = Json::parse(embedded::kConfigSchema);
  return s;
}

const Json& summary_schema() {
  static const Json s = Json::parse(embedded::kSummarySchema);
  return s;
}

}  // namespace ldp
