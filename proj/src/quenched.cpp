#include "ldp/quenched.hpp"

#include <cmath>
#include <map>

#include "ldp/error.hpp"

namespace ldp {

QuenchedBackground::QuenchedBackground(const ModelParams& params, EnvironmentKind kind)
    : kind_(kind), constants_(derived_constants(params)) {
  n_ = constants_.n;
  q_ = constants_.q_n;
  z_f_ = params.z_f;
  w_ = params.law_w.discretization();
  const BoundedDistribution zc = params.law_zc.discretization();
  const BoundedDistribution zv = params.law_zv.discretization();
  if (kind == EnvironmentKind::R) {
    groups_[0] = {zc, w_, params.n_c};
    groups_[1] = {zv, w_, params.n_v};
  } else {
    groups_[0] = {w_, zc, params.n_c};
    groups_[1] = {w_, zv, params.n_v};
  }
}

CumulantValues QuenchedBackground::peptide(int group, double t, double s) const {
  const auto k = groups_[group].inner.cumulants(t * s);
  return {k.value, s * k.d1, s * s * k.d2};
}

CumulantValues QuenchedBackground::centering(int group, double t) const {
  const auto& outer = groups_[group].outer;
  CumulantValues r;
  for (std::size_t i = 0; i < outer.points().size(); ++i) {
    const auto p = peptide(group, t, outer.points()[i]);
    const double w = outer.weights()[i];
    r.psi += w * p.psi;
    r.dpsi += w * p.dpsi;
    r.d2psi += w * p.d2psi;
  }
  return r;
}

CumulantValues QuenchedBackground::g(double t) const {
  CumulantValues r;
  for (int k = 0; k < 2; ++k) {
    if (groups_[k].count == 0) continue;
    const double frac = static_cast<double>(groups_[k].count) / n_;
    const auto c = centering(k, t);
    r.psi += frac * c.psi;
    r.dpsi += frac * c.dpsi;
    r.d2psi += frac * c.d2psi;
  }
  return r;
}

CumulantValues QuenchedBackground::foreign(double theta, double w_f) const {
  if (z_f_ == 0.0) return {};
  if (kind_ == EnvironmentKind::R) return {theta * z_f_ * w_f, z_f_ * w_f, 0.0};
  const auto k = w_.cumulants(z_f_ * theta);
  return {k.value, z_f_ * k.d1, z_f_ * z_f_ * k.d2};
}

CumulantFunction QuenchedBackground::deterministic_cumulant(double w_f) const {
  return CumulantFunction([this, w_f](double theta) {
    const auto gv = g(q_ * theta);
    const auto f = foreign(theta, w_f);
    return CumulantValues{gv.psi + f.psi / n_, q_ * gv.dpsi + f.dpsi / n_,
                          q_ * q_ * gv.d2psi + f.d2psi / n_};
  });
}

double QuenchedAssembly::peptide_log_mgf(int j, double theta) const {
  const int n_c = background->groups()[0].count;
  const int group = j < n_c ? 0 : 1;
  return background->peptide(group, theta, env.values.at(j)).psi;
}

CumulantValues QuenchedAssembly::fluctuation(double t) const {
  CumulantValues r;
  for (int k = 0; k < 2; ++k) {
    const int count = background->groups()[k].count;
    if (count == 0) continue;
    const auto c = background->centering(k, t);
    for (const auto& [s, m] : blocks[k]) {
      const auto p = background->peptide(k, t, s);
      r.psi += m * (p.psi - c.psi);
      r.dpsi += m * (p.dpsi - c.dpsi);
      r.d2psi += m * (p.d2psi - c.d2psi);
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(background->n()));
  r.psi *= scale;
  r.dpsi *= scale;
  r.d2psi *= scale;
  return r;
}

QuenchedAssembly assemble_quenched(const ModelParams& params, const Environment& env) {
  check_environment(params, env);
  return assemble_quenched(std::make_shared<const QuenchedBackground>(params, env.kind), env);
}

QuenchedAssembly assemble_quenched(std::shared_ptr<const QuenchedBackground> background,
                                   const Environment& env, bool detect_lattice) {
  if (env.kind != background->kind())
    throw SchemaError("environment kind does not match the quenched regime");
  const int n_c = background->groups()[0].count;
  const int m = n_c + background->groups()[1].count;
  const std::size_t want = env.kind == EnvironmentKind::R ? m + 1 : m;
  if (env.values.size() != want) throw SchemaError("environment length does not match the model");

  QuenchedAssembly out;
  out.background = background;
  out.env = env;
  out.env_hash = environment_hash(env);
  for (int k = 0; k < 2; ++k) {
    std::map<double, int> counts;
    const int lo = k == 0 ? 0 : n_c;
    const int hi = k == 0 ? n_c : m;
    for (int j = lo; j < hi; ++j) ++counts[env.values[j]];
    out.blocks[k].assign(counts.begin(), counts.end());
  }
  if (env.kind == EnvironmentKind::R) out.w_f = env.values[m];

  const double n = background->n();
  const double q = background->q();
  out.cumulant = CumulantFunction(
      [bg = background, blocks = out.blocks, w_f = out.w_f, n, q](double theta) {
        CumulantValues r;
        const double t = q * theta;
        for (int k = 0; k < 2; ++k) {
          for (const auto& [s, cnt] : blocks[k]) {
            const auto p = bg->peptide(k, t, s);
            r.psi += cnt * p.psi;
            r.dpsi += cnt * p.dpsi;
            r.d2psi += cnt * p.d2psi;
          }
        }
        const auto f = bg->foreign(theta, w_f);
        return CumulantValues{(r.psi + f.psi) / n, (q * r.dpsi + f.dpsi) / n,
                              (q * q * r.d2psi + f.d2psi) / n};
      });

  if (!detect_lattice) return out;
  std::vector<ScaledTerm> terms;
  for (int k = 0; k < 2; ++k)
    for (const auto& [s, cnt] : out.blocks[k])
      terms.push_back({&background->groups()[k].inner, q * s});
  if (env.kind == EnvironmentKind::Z) terms.push_back({&background->law_w(), background->z_f()});
  out.lattice = sum_is_lattice(terms);
  return out;
}

namespace {

void check_foreign_level(const QuenchedAssembly& assembly, double a) {
  const auto& bg = *assembly.background;
  if (bg.kind() == EnvironmentKind::R && a * bg.n() <= bg.z_f() * assembly.w_f)
    throw DomainError("foreign contribution z_f W_f alone reaches the threshold a n",
                      "foreign-dominates");
}

}  // namespace

TiltSolution rate_quenched(const QuenchedAssembly& assembly, double a) {
  check_foreign_level(assembly, a);
  return solve_tilt(assembly.cumulant, a);
}

TiltSolution rate_quenched(const ModelParams& params, const Environment& env, double a) {
  return rate_quenched(assemble_quenched(params, env), a);
}

ActivationEstimate probability_quenched(const QuenchedAssembly& assembly, double a) {
  auto est = sharp_estimate(rate_quenched(assembly, a), assembly.n());
  est.env_hash = assembly.env_hash;
  if (assembly.lattice) est.warnings.emplace_back("lattice");
  return est;
}

ActivationEstimate probability_quenched(const ModelParams& params, const Environment& env,
                                        double a) {
  return probability_quenched(assemble_quenched(params, env), a);
}

RateDecomposition decompose_rate(const QuenchedAssembly& assembly, double a) {
  check_foreign_level(assembly, a);
  const auto& bg = *assembly.background;
  const double n = bg.n();
  const double q = bg.q();
  RateDecomposition d;
  d.theta0 = solve_tilt(bg.deterministic_cumulant(assembly.w_f), a).theta;
  const double t0 = q * d.theta0;
  const auto gv = bg.g(t0);
  d.g_d2 = gv.d2psi;
  if (!(d.g_d2 > kDecompositionCurvatureFloor))
    throw DomainError("curvature of g_n at the deterministic tilt is too small",
                      "decomposition-unavailable");
  d.I0 = a * d.theta0 - gv.psi;
  const auto f = bg.foreign(d.theta0, assembly.w_f);
  d.foreign_term = f.psi / n;
  const auto z = assembly.fluctuation(t0);
  d.Zn = z.psi;
  d.Zn_d1 = z.dpsi;
  d.Zn_d2 = z.d2psi;
  const double denom = d.g_d2 + z.d2psi / std::sqrt(n) + f.d2psi / (n * q * q);
  d.remainder = z.dpsi * z.dpsi / (2.0 * n * denom);
  d.total = d.I0 - d.foreign_term - d.Zn / std::sqrt(n) + d.remainder;
  d.direct_rate = rate_quenched(assembly, a).rate;
  d.discrepancy = d.total - d.direct_rate;
  return d;
}

RateDecomposition decompose_rate(const ModelParams& params, const Environment& env, double a) {
  return decompose_rate(assemble_quenched(params, env), a);
}

TiltSolution deterministic_tilt(const ModelParams& params, EnvironmentKind kind, double a) {
  const QuenchedBackground bg(params.with_z_f(0.0), kind);
  return solve_tilt(bg.deterministic_cumulant(0.0), a);
}

namespace {

RatioEstimate make_ratio(const ModelParams& params, double theta, double top, double a,
                         double z_f) {
  const auto c0 = derived_constants(params.with_z_f(0.0));
  derived_constants(params.with_z_f(z_f));
  RatioEstimate r;
  r.theta = theta;
  r.slope = theta * (top - a * c0.n / c0.n_M);
  r.log_value = z_f * r.slope;
  r.value = std::exp(r.log_value);
  if (z_f > 0.0 && z_f < 2.0 * std::sqrt(static_cast<double>(c0.n)))
    r.warnings.emplace_back("small-z_f");
  return r;
}

}  // namespace

RatioEstimate ratio_quenched_R(const ModelParams& params, const Environment& env, double a,
                               double z_f) {
  if (env.kind != EnvironmentKind::R) throw SchemaError("ratio_quenched_R needs an R environment");
  check_environment(params, env);
  const double theta = deterministic_tilt(params, EnvironmentKind::R, a).theta;
  return make_ratio(params, theta, env.foreign_rate(), a, z_f);
}

RatioEstimate ratio_quenched_Z(const ModelParams& params, double a, double z_f) {
  const double theta = deterministic_tilt(params, EnvironmentKind::Z, a).theta;
  return make_ratio(params, theta, params.law_w.upper(), a, z_f);
}

}  // namespace ldp
