#include "ldp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "ldp/annealed.hpp"
#include "ldp/error.hpp"
#include "ldp/parallel.hpp"
#include "ldp/quenched.hpp"

namespace ldp {

namespace {

// One independent summand of G: scale * X with X ~ law, repeated count times.
struct Summand {
  BoundedDistribution law;
  double scale;
  int count;
};

// Summands of G in draw order; deterministic parts are degenerate summands.
std::vector<Summand> summands(const ModelParams& p, const Environment* env) {
  const auto c = derived_constants(p);
  std::vector<Summand> out;
  if (env == nullptr) {
    if (p.n_c > 0) out.push_back({product_law(p.law_zc.discretization(), p.law_w.discretization()), c.q_n, p.n_c});
    if (p.n_v > 0) out.push_back({product_law(p.law_zv.discretization(), p.law_w.discretization()), c.q_n, p.n_v});
    out.push_back({p.law_w.discretization(), p.z_f, 1});
    return out;
  }
  check_environment(p, *env);
  const int m = p.self_count();
  if (env->kind == EnvironmentKind::R) {
    for (int j = 0; j < m; ++j)
      out.push_back({(j < p.n_c ? p.law_zc : p.law_zv).discretization(), c.q_n * env->values[j], 1});
    out.push_back({BoundedDistribution::degenerate(env->values[m]), p.z_f, 1});
  } else {
    for (int j = 0; j < m; ++j) out.push_back({p.law_w.discretization(), c.q_n * env->values[j], 1});
    out.push_back({p.law_w.discretization(), p.z_f, 1});
  }
  return out;
}

void require_discrete(const ModelParams& p) {
  for (const auto* law : {&p.law_zc, &p.law_zv, &p.law_w})
    if (law->kind() != DistributionKind::Discrete)
      throw DomainError("exact enumeration needs finite-discrete laws", "non-discrete");
}

}  // namespace

OracleEstimate exact_tail(const ModelParams& params, const Environment* env, double a,
                          const ExactOptions& options) {
  require_discrete(params);
  const auto terms = summands(params, env);
  const double threshold = a * params.n();

  double base = 0.0;
  std::vector<double> offsets{0.0};
  for (const auto& t : terms) {
    const double lo = t.law.lower() * t.scale;
    base += t.count * lo;
    if (t.scale == 0.0) continue;
    for (double x : t.law.points()) {
      const double d = x * t.scale - lo;
      if (d > 0.0) offsets.push_back(d);
    }
  }

  OracleEstimate est;
  est.method = "exact";
  if (offsets.size() == 1) {
    // Everything deterministic.
    est.value = base >= threshold - options.resolution * std::max(1.0, std::abs(threshold)) ? 1.0 : 0.0;
    est.states = 1;
    return est;
  }
  const auto span = common_lattice_span(offsets, options.resolution, 1.0 / options.resolution);
  if (!span) throw DomainError("support points are not commensurable at the lattice resolution",
                               "incommensurable");
  const double h = *span;

  struct Step {
    std::vector<long long> k;
    std::vector<double> p;
    int count;
  };
  std::vector<Step> steps;
  long long total = 0;
  for (const auto& t : terms) {
    if (t.scale == 0.0 || t.law.is_degenerate()) continue;
    Step s;
    s.count = t.count;
    const double lo = t.law.lower() * t.scale;
    for (std::size_t i = 0; i < t.law.points().size(); ++i) {
      s.k.push_back(std::llround((t.law.points()[i] * t.scale - lo) / h));
      s.p.push_back(t.law.weights()[i]);
    }
    total += t.count * *std::max_element(s.k.begin(), s.k.end());
    if (total + 1 > options.max_states)
      throw DomainError("exact enumeration exceeds the state bound", "state-bound");
    steps.push_back(std::move(s));
  }

  std::vector<double> dist{1.0};
  for (const auto& s : steps) {
    const long long kmax = *std::max_element(s.k.begin(), s.k.end());
    for (int rep = 0; rep < s.count; ++rep) {
      std::vector<double> next(dist.size() + kmax, 0.0);
      for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] == 0.0) continue;
        for (std::size_t m = 0; m < s.k.size(); ++m) next[i + s.k[m]] += dist[i] * s.p[m];
      }
      dist.swap(next);
    }
  }

  const double x = (threshold - base) / h;
  const long long kmin = static_cast<long long>(std::ceil(x - options.resolution * std::max(1.0, std::abs(x))));
  double tail = 0.0;
  for (long long k = static_cast<long long>(dist.size()) - 1; k >= std::max(0LL, kmin); --k) tail += dist[k];
  est.value = std::clamp(tail, 0.0, 1.0);
  est.states = static_cast<long long>(dist.size());
  return est;
}

namespace {

struct ChunkSums {
  double s = 0.0;
  double s2 = 0.0;
};

template <class Draw>
std::vector<ChunkSums> run_chunks(long long draws, std::uint64_t seed, Draw&& draw) {
  const long long chunks = (draws + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<ChunkSums> out(chunks);
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    Rng rng = Rng::substream(seed, c);
    const long long lo = static_cast<long long>(c) * kMonteCarloChunk;
    const long long hi = std::min(draws, lo + kMonteCarloChunk);
    ChunkSums sums;
    for (long long i = lo; i < hi; ++i) {
      const double v = draw(rng);
      sums.s += v;
      sums.s2 += v * v;
    }
    out[c] = sums;
  });
  return out;
}

}  // namespace

OracleEstimate naive_mc(const ModelParams& params, const Environment* env, double a,
                        long long draws, std::uint64_t seed) {
  if (draws < 1) throw SchemaError("draws must be >= 1");
  const GSampler sampler(params, env);
  const double threshold = a * params.n();
  const auto chunks = run_chunks(draws, seed, [&](Rng& rng) { return sampler(rng) >= threshold ? 1.0 : 0.0; });
  double hits = 0.0;
  for (const auto& c : chunks) hits += c.s;
  OracleEstimate est;
  est.method = "naive-mc";
  est.draws = draws;
  est.seed = seed;
  est.value = hits / draws;
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / draws);
  return est;
}

OracleEstimate tilted_is(const ModelParams& params, const Environment* env, double a,
                         long long draws, std::uint64_t seed, std::optional<double> forced_theta) {
  if (draws < 1) throw SchemaError("draws must be >= 1");
  const auto c = derived_constants(params);
  const double n = c.n;
  const double q = c.q_n;

  CumulantFunction cumulant;
  if (env == nullptr) {
    cumulant = assemble_annealed(params).cumulant;
  } else {
    check_environment(params, *env);
    cumulant = assemble_quenched(params, *env).cumulant;
  }
  const double theta = forced_theta ? *forced_theta
                       : env == nullptr ? solve_tilt(cumulant, a).theta
                                        : rate_quenched(params, *env, a).theta;
  const double log_phi = n * cumulant.psi(theta);

  // Per-summand tilted laws: summand value is (scale * x) * q_factor, with
  // x drawn from the law tilted at theta * q_factor * scale.
  struct Tilted {
    BoundedDistribution law;
    double mult;  // S += factor * (x * mult)
    double factor;
  };
  std::vector<Tilted> laws;
  std::vector<int> index;  // summand -> laws entry, in draw order
  double shift = 0.0;
  const int m = params.self_count();
  if (env == nullptr) {
    if (params.n_c > 0) {
      laws.push_back({product_law(params.law_zc.discretization(), params.law_w.discretization()).tilted(q * theta), 1.0, q});
      index.insert(index.end(), params.n_c, 0);
    }
    if (params.n_v > 0) {
      laws.push_back({product_law(params.law_zv.discretization(), params.law_w.discretization()).tilted(q * theta), 1.0, q});
      index.insert(index.end(), params.n_v, static_cast<int>(laws.size()) - 1);
    }
    laws.push_back({params.law_w.discretization().tilted(params.z_f * theta), 1.0, params.z_f});
    index.push_back(static_cast<int>(laws.size()) - 1);
  } else {
    std::map<std::pair<int, double>, int> cache;
    for (int j = 0; j < m; ++j) {
      const double s = env->values[j];
      const int group = env->kind == EnvironmentKind::R ? (j < params.n_c ? 0 : 1) : 2;
      auto [it, fresh] = cache.emplace(std::make_pair(group, s), static_cast<int>(laws.size()));
      if (fresh) {
        const BoundedDistribution& inner =
            group == 0 ? params.law_zc : group == 1 ? params.law_zv : params.law_w;
        laws.push_back({inner.discretization().tilted(q * theta * s), s, q});
      }
      index.push_back(it->second);
    }
    if (env->kind == EnvironmentKind::R) {
      shift = params.z_f * env->values[m];
    } else {
      laws.push_back({params.law_w.discretization().tilted(params.z_f * theta), 1.0, params.z_f});
      index.push_back(static_cast<int>(laws.size()) - 1);
    }
  }

  const double threshold = a * n;
  const auto chunks = run_chunks(draws, seed, [&](Rng& rng) {
    double sum = 0.0;
    for (int k : index) {
      const auto& t = laws[k];
      sum += t.factor * (t.law.sample(rng) * t.mult);
    }
    sum += shift;
    if (sum < threshold) return 0.0;
    return std::exp(log_phi - theta * sum);
  });
  double s = 0.0, s2 = 0.0;
  for (const auto& ch : chunks) {
    s += ch.s;
    s2 += ch.s2;
  }
  OracleEstimate est;
  est.method = "tilted-is";
  est.draws = draws;
  est.seed = seed;
  est.theta = theta;
  const double mean = s / draws;
  const double var = draws > 1 ? std::max(0.0, (s2 - s * mean) / (draws - 1)) : 0.0;
  est.value = std::clamp(mean, 0.0, 1.0);
  est.std_error = std::sqrt(var / draws);
  return est;
}

}  // namespace ldp
