#include "dcd/priors.hpp"

#include <cmath>

namespace dcd {

FiniteMixturePrior fractionate_finite(const FiniteMixturePrior& prior, int J, int p) {
  if (J < 1) throw InvalidShardCount("fractionate_finite: J must be >= 1");
  if (J == 1) return prior;
  FiniteMixturePrior out = prior;
  const double Jd = static_cast<double>(J);
  for (double& a : out.alpha) a /= Jd;
  out.l = prior.l * Jd;
  out.nu = prior.nu / Jd - (p + 1.0) * (Jd - 1.0) / Jd;
  out.S = prior.S / Jd;
  return out;
}

DpmnPrior fractionate_dpmn(const DpmnPrior& prior, int J) {
  if (J < 1) throw InvalidShardCount("fractionate_dpmn: J must be >= 1");
  if (J == 1) return prior;
  DpmnPrior out = prior;
  const double Jd = static_cast<double>(J);
  out.mass = prior.mass / Jd;
  // inverse-gamma 1/J power rule: (shape+1)/J - 1, scale/J
  out.ig_shape = prior.ig_shape / Jd - (Jd - 1.0) / Jd;
  out.ig_scale = prior.ig_scale / Jd;
  return out;
}

DeconvPrior fractionate_deconv(const DeconvPrior& prior, int J, bool fractionate_beta) {
  if (J < 1) throw InvalidShardCount("fractionate_deconv: J must be >= 1");
  if (J == 1) return prior;
  DeconvPrior out = prior;
  const double Jd = static_cast<double>(J);
  out.dp_mass = prior.dp_mass / Jd;
  out.lambda = prior.lambda / Jd;  // truncation point t is unchanged
  if (fractionate_beta) {
    // gamma 1/J power rule
    out.xi1 = (prior.xi1 + Jd - 1.0) / Jd;
    out.xi2 = prior.xi2 / Jd;
  }
  return out;
}

DirichletParams marginal_dirichlet_of_dp(double mass, const std::vector<double>& cell_probs) {
  if (!(mass > 0.0)) throw ImproperDistribution("marginal_dirichlet_of_dp: mass must be positive");
  double s = 0.0;
  for (double p : cell_probs) {
    if (!(p >= 0.0)) throw OutOfSupport("marginal_dirichlet_of_dp: negative cell probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-8)
    throw OutOfSupport("marginal_dirichlet_of_dp: cell probabilities must sum to 1");
  DirichletParams out;
  out.alpha.reserve(cell_probs.size());
  for (double p : cell_probs) out.alpha.push_back(mass * p);
  return out;
}

}  // namespace dcd
