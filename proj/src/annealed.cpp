#include "ldp/annealed.hpp"

#include <cmath>

namespace ldp {

AnnealedAssembly assemble_annealed(const ModelParams& params) {
  AnnealedAssembly out;
  out.constants = derived_constants(params);
  out.n = out.constants.n;
  out.product_c = std::make_shared<const BoundedDistribution>(
      product_law(params.law_zc.discretization(), params.law_w.discretization()));
  out.product_v = std::make_shared<const BoundedDistribution>(
      product_law(params.law_zv.discretization(), params.law_w.discretization()));
  auto w = std::make_shared<const BoundedDistribution>(params.law_w.discretization());

  const double n = out.n;
  const double wc = params.n_c / n;
  const double wv = params.n_v / n;
  const double q = out.constants.q_n;
  const double zf = params.z_f;
  out.cumulant = CumulantFunction(
      [pc = out.product_c, pv = out.product_v, w, wc, wv, q, zf, n](double theta) {
        CumulantValues r;
        if (wc > 0.0) {
          const auto k = pc->cumulants(q * theta);
          r.psi += wc * k.value;
          r.dpsi += wc * q * k.d1;
          r.d2psi += wc * q * q * k.d2;
        }
        if (wv > 0.0) {
          const auto k = pv->cumulants(q * theta);
          r.psi += wv * k.value;
          r.dpsi += wv * q * k.d1;
          r.d2psi += wv * q * q * k.d2;
        }
        if (zf > 0.0) {
          const auto k = w->cumulants(zf * theta);
          r.psi += k.value / n;
          r.dpsi += zf * k.d1 / n;
          r.d2psi += zf * zf * k.d2 / n;
        }
        return r;
      });

  std::vector<ScaledTerm> terms;
  if (params.n_c > 0) terms.push_back({out.product_c.get(), q});
  if (params.n_v > 0) terms.push_back({out.product_v.get(), q});
  terms.push_back({&params.law_w, zf});
  out.lattice = sum_is_lattice(terms);
  out.degenerate = (params.n_c == 0 || out.product_c->is_degenerate()) &&
                   (params.n_v == 0 || out.product_v->is_degenerate()) &&
                   (zf == 0.0 || params.law_w.is_degenerate());
  return out;
}

TiltSolution rate_annealed(const ModelParams& params, double a) {
  return solve_tilt(assemble_annealed(params).cumulant, a);
}

ActivationEstimate probability_annealed(const ModelParams& params, double a) {
  const auto asm_ = assemble_annealed(params);
  auto est = sharp_estimate(solve_tilt(asm_.cumulant, a), asm_.n);
  if (asm_.lattice) est.warnings.emplace_back("lattice");
  return est;
}

RatioEstimate ratio_annealed(const ModelParams& params, double a, double z_f) {
  const ModelParams base = params.with_z_f(0.0);
  const auto c0 = derived_constants(base);
  derived_constants(params.with_z_f(z_f));
  RatioEstimate r;
  r.theta = rate_annealed(base, a).theta;
  const double level = a * c0.n / c0.n_M;
  r.slope = r.theta * (params.law_w.upper() - level);
  r.log_value = z_f * r.slope;
  r.value = std::exp(r.log_value);
  if (z_f > 0.0 && z_f < 2.0 * std::sqrt(static_cast<double>(c0.n)))
    r.warnings.emplace_back("small-z_f");
  return r;
}

}  // namespace ldp
