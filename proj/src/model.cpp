#include "ldp/model.hpp"

#include <cmath>
#include <cstring>

#include "ldp/error.hpp"
#include "ldp/stats.hpp"

namespace ldp {

DerivedConstants derived_constants(const ModelParams& params) {
  if (params.n_c < 0 || params.n_v < 0 || params.n_c + params.n_v < 1)
    throw SchemaError("n_c and n_v must be nonnegative with n_c + n_v >= 1");
  if (!(params.z_f >= 0.0) || !std::isfinite(params.z_f))
    throw SchemaError("z_f must be a finite nonnegative number");
  DerivedConstants c;
  c.n = params.n();
  c.n_M = params.n_c * params.law_zc.mean() + params.n_v * params.law_zv.mean();
  if (!(c.n_M > 0.0)) throw DomainError("expected number of self peptides n_M must be > 0", "n_M");
  if (params.z_f >= c.n_M)
    throw DomainError("z_f must be below n_M (q_n would be <= 0)", "displacement");
  c.q_n = (c.n_M - params.z_f) / c.n_M;
  return c;
}

std::string to_string(EnvironmentKind kind) { return kind == EnvironmentKind::R ? "R" : "Z"; }

EnvironmentKind environment_kind_from_string(const std::string& s) {
  if (s == "R") return EnvironmentKind::R;
  if (s == "Z") return EnvironmentKind::Z;
  throw SchemaError("environment kind must be \"R\" or \"Z\"");
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Annealed: return "annealed";
    case Regime::QuenchedR: return "quenched-R";
    case Regime::QuenchedZ: return "quenched-Z";
  }
  return "annealed";
}

Regime regime_from_string(const std::string& s) {
  if (s == "annealed") return Regime::Annealed;
  if (s == "quenched-R") return Regime::QuenchedR;
  if (s == "quenched-Z") return Regime::QuenchedZ;
  throw SchemaError("regime must be one of annealed, quenched-R, quenched-Z");
}

std::uint64_t environment_hash(const Environment& env) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const char tag = env.kind == EnvironmentKind::R ? 'R' : 'Z';
  mix(&tag, 1);
  for (double v : env.values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    mix(&bits, sizeof bits);
  }
  return h;
}

namespace {

void check_within(const BoundedDistribution& law, double x, const char* what) {
  const double tol = 1e-12 * std::max(1.0, law.upper());
  if (!(x >= law.lower() - tol && x <= law.upper() + tol))
    throw SchemaError(std::string("environment entry outside the support of ") + what);
}

const BoundedDistribution& z_law(const ModelParams& p, int j) {
  return j < p.n_c ? p.law_zc : p.law_zv;
}

}  // namespace

void check_environment(const ModelParams& params, const Environment& env) {
  const auto m = static_cast<std::size_t>(params.self_count());
  if (env.kind == EnvironmentKind::R) {
    if (env.values.size() != m + 1)
      throw SchemaError("R environment needs n_c + n_v + 1 stimulation rates");
    for (double w : env.values) check_within(params.law_w, w, "the stimulation-rate law");
  } else {
    if (env.values.size() != m) throw SchemaError("Z environment needs n_c + n_v copy numbers");
    for (std::size_t j = 0; j < m; ++j)
      check_within(z_law(params, static_cast<int>(j)), env.values[j], "the copy-number law");
  }
}

Environment sample_environment(const ModelParams& params, EnvironmentKind kind, Rng& rng) {
  Environment env;
  env.kind = kind;
  env.seed = rng.seed();
  const int m = params.self_count();
  if (kind == EnvironmentKind::R) {
    env.values.resize(m + 1);
    for (double& w : env.values) w = params.law_w.sample(rng);
  } else {
    env.values.resize(m);
    for (int j = 0; j < m; ++j) env.values[j] = z_law(params, j).sample(rng);
  }
  return env;
}

GSampler::GSampler(const ModelParams& params, const Environment* env)
    : params_(&params), env_(env), q_(derived_constants(params).q_n) {
  if (env_ != nullptr) check_environment(params, *env_);
}

double GSampler::operator()(Rng& rng) const {
  const ModelParams& p = *params_;
  const int m = p.self_count();
  double self = 0.0;
  if (env_ != nullptr && env_->kind == EnvironmentKind::Z) {
    for (int j = 0; j < m; ++j) self += env_->values[j] * p.law_w.sample(rng);
    const double w_f = p.law_w.sample(rng);
    return q_ * self + p.z_f * w_f;
  }
  thread_local std::vector<double> copies;
  copies.resize(m);
  for (int j = 0; j < m; ++j) copies[j] = z_law(p, j).sample(rng);
  if (env_ != nullptr) {
    for (int j = 0; j < m; ++j) self += copies[j] * env_->values[j];
    return q_ * self + p.z_f * env_->values[m];
  }
  for (int j = 0; j < m; ++j) self += copies[j] * p.law_w.sample(rng);
  const double w_f = p.law_w.sample(rng);
  return q_ * self + p.z_f * w_f;
}

double sample_G(const ModelParams& params, Rng& rng) { return GSampler(params)(rng); }

double sample_G_given(const ModelParams& params, const Environment& env, Rng& rng) {
  return GSampler(params, &env)(rng);
}

AnnealedMoments moments_annealed(const ModelParams& params) {
  const auto c = derived_constants(params);
  const auto w = params.law_w.moments();
  const double w2 = params.law_w.second_moment();
  auto product_variance = [&](const BoundedDistribution& z) {
    const double m = z.mean();
    return z.second_moment() * w2 - m * m * w.mean * w.mean;
  };
  AnnealedMoments out;
  out.mean = c.q_n * (params.n_c * params.law_zc.mean() * w.mean +
                      params.n_v * params.law_zv.mean() * w.mean) +
             params.z_f * w.mean;
  out.variance_at_zero =
      params.n_c * product_variance(params.law_zc) + params.n_v * product_variance(params.law_zv);
  out.variance = c.q_n * c.q_n * out.variance_at_zero + params.z_f * params.z_f * w.variance;
  const double n_m2 = c.n_M * c.n_M;
  const double denom = w.variance * n_m2 + out.variance_at_zero;
  out.second_root = denom > 0.0 ? 2.0 * c.n_M * out.variance_at_zero / denom : 0.0;
  out.variance_diff = (w.variance + out.variance_at_zero / n_m2) * params.z_f *
                      (params.z_f - out.second_root);
  return out;
}

ConditionalMoments moments_quenched_R(const ModelParams& params, const Environment& env) {
  if (env.kind != EnvironmentKind::R) throw SchemaError("moments_quenched_R needs an R environment");
  check_environment(params, env);
  const auto c = derived_constants(params);
  const int m = params.self_count();
  const auto zc = params.law_zc.moments();
  const auto zv = params.law_zv.moments();
  double mean0 = 0.0, var0 = 0.0;
  for (int j = 0; j < m; ++j) {
    const auto& z = j < params.n_c ? zc : zv;
    const double wj = env.values[j];
    mean0 += z.mean * wj;
    var0 += z.variance * wj * wj;
  }
  const double w_f = env.values[m];
  ConditionalMoments out;
  out.mean_at_zero = mean0;
  out.variance_at_zero = var0;
  out.mean = c.q_n * mean0 + params.z_f * w_f;
  out.variance = c.q_n * c.q_n * var0;
  out.mean_diff = params.z_f * (w_f - params.law_w.mean());
  out.mean_diff_exact = out.mean - out.mean_at_zero;
  out.second_root = 2.0 * c.n_M;
  out.variance_diff = var0 * params.z_f * (params.z_f - 2.0 * c.n_M) / (c.n_M * c.n_M);
  return out;
}

ConditionalMoments moments_quenched_Z(const ModelParams& params, const Environment& env) {
  if (env.kind != EnvironmentKind::Z) throw SchemaError("moments_quenched_Z needs a Z environment");
  check_environment(params, env);
  const auto c = derived_constants(params);
  const auto w = params.law_w.moments();
  double sum_z = 0.0, sum_z2 = 0.0;
  for (double z : env.values) {
    sum_z += z;
    sum_z2 += z * z;
  }
  ConditionalMoments out;
  out.mean_at_zero = sum_z * w.mean;
  out.variance_at_zero = sum_z2 * w.variance;
  out.mean = c.q_n * sum_z * w.mean + params.z_f * w.mean;
  out.variance = c.q_n * c.q_n * out.variance_at_zero + params.z_f * params.z_f * w.variance;
  out.mean_diff = 0.0;
  out.mean_diff_exact = out.mean - out.mean_at_zero;
  const double n_m2 = c.n_M * c.n_M;
  const double denom = w.variance * n_m2 + out.variance_at_zero;
  out.second_root = denom > 0.0 ? 2.0 * c.n_M * out.variance_at_zero / denom : 0.0;
  out.variance_diff = (w.variance + out.variance_at_zero / n_m2) * params.z_f *
                      (params.z_f - out.second_root);
  return out;
}

Interval normal_interval(const ModelParams& params, double z_f, double coverage, Regime regime,
                         const Environment* env) {
  if (!(coverage > 0.0 && coverage < 1.0))
    throw DomainError("coverage must lie in (0, 1)", "coverage");
  const ModelParams p = params.with_z_f(z_f);
  double mean = 0.0, variance = 0.0;
  if (regime == Regime::Annealed) {
    const auto m = moments_annealed(p);
    mean = m.mean;
    variance = m.variance;
  } else {
    if (env == nullptr) throw SchemaError("quenched interval needs an environment");
    const auto m = regime == Regime::QuenchedR ? moments_quenched_R(p, *env)
                                               : moments_quenched_Z(p, *env);
    mean = m.mean;
    variance = m.variance;
  }
  const double half = normal_quantile(0.5 * (1.0 + coverage)) * std::sqrt(std::max(0.0, variance));
  return {mean - half, mean + half};
}

}  // namespace ldp
