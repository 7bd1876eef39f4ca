#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dcd/stats.hpp"

namespace dcd {

/// How a shard chain treats the prior.
enum class PriorMode { kFull, kNaive, kFraction };

/* Finite-mixture prior: pi ~ Dir(alpha); mu_k | Sigma_k ~ N_p(0, l * Sigma_k);
   Sigma_k ~ IW(nu, S). Fractionation by J: alpha/J, l*J,
   nu/J - (p+1)(J-1)/J, S/J. */
struct FiniteMixturePrior {
  std::vector<double> alpha;
  double l = 100.0;
  double nu = 2.0;
  Eigen::MatrixXd S;

  [[nodiscard]] int K() const { return static_cast<int>(alpha.size()); }
  [[nodiscard]] InvWishartParams cov_prior() const { return {nu, S}; }
};

/* DPMN prior: G_0 = DP(mass, N(m0, s02)) truncated in the sampler;
   sigma^2 ~ IG(ig_shape, ig_scale). Fractionation: mass/J and the
   inverse-gamma 1/J power rule. */
struct DpmnPrior {
  double mass = 1.0;
  double m0 = 0.0;
  double s02 = 1.0;
  double ig_shape = 2.0;
  double ig_scale = 2.0;

  [[nodiscard]] InvGammaParams sigma2_prior() const { return {ig_shape, ig_scale}; }
};

/* Shape-constrained deconvolution prior: mixture weights from the marginal
   Dirichlet of a DP with mass dp_mass over K cells; shapes
   z_k ~ Exponential(lambda) truncated to (t, inf); rates beta_k ~ Ga(xi1, xi2).
   Fractionation: dp_mass/J, lambda/J (same truncation), and - when
   fractionate_beta is set - Ga((xi1+J-1)/J, xi2/J) by the gamma power rule. */
struct DeconvPrior {
  int K = 30;
  double dp_mass = 1.0;
  double lambda = 1.0;
  double t = 1.5;
  double xi1 = 2.0;
  double xi2 = 2.0;
};

FiniteMixturePrior fractionate_finite(const FiniteMixturePrior& prior, int J, int p);
DpmnPrior fractionate_dpmn(const DpmnPrior& prior, int J);
DeconvPrior fractionate_deconv(const DeconvPrior& prior, int J, bool fractionate_beta = true);

/// Dirichlet induced by a DP(mass, G) on a finite measurable partition:
/// alpha_i = mass * cell_probs_i.
DirichletParams marginal_dirichlet_of_dp(double mass, const std::vector<double>& cell_probs);

}  // namespace dcd
