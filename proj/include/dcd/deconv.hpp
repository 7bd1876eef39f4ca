#pragma once

#include <vector>

#include "dcd/chain.hpp"
#include "dcd/priors.hpp"
#include "dcd/rng.hpp"

namespace dcd {

/* Gibbs sampler for symmetric unimodal deconvolution. The latent density is a
   scale mixture of uniforms: x | theta ~ U(-theta, theta), theta | Z = k ~
   Ga(alpha_k, beta_k), with observed w_i = x_i + N(0, sigma_i^2).

   Conditionals per sweep (order x -> theta -> Z -> p -> beta -> alpha):
     x_i     ~ N(w_i, sigma_i^2) truncated to (-theta_i, theta_i)
     theta_i ~ Ga(alpha_{Z_i} - 1, beta_{Z_i}) truncated to (|x_i|, inf)
     Z_i     ~ Cat( p_k Ga(theta_i; alpha_k, beta_k) )
     p       ~ Dir( mass_eff/K + r_1, ... )
     beta_k  ~ Ga( xi1_eff + alpha_k r_k, xi2_eff + s_k )
     alpha_k ~ MH with target prop. to Gamma(alpha)^-r_k
               exp{-alpha (lambda_eff - r_k log beta_k - sum log theta_i)} on (t, inf),
               proposal Ga(2, 2/alpha_cur) truncated to (t, inf). */

struct NoisyObservation {
  double w = 0.0;
  double sigma = 1.0;
};

struct DeconvState {
  std::vector<double> p;      // K mixture weights
  std::vector<double> alpha;  // K shapes, all > t
  std::vector<double> beta;   // K rates
  std::vector<double> x;      // latent signals
  std::vector<double> theta;  // latent uniform half-widths, theta_i > |x_i|
  std::vector<int> z;
};

std::vector<double> deconv_alloc_probs(const DeconvState& st, double theta_i);
/// Log MH acceptance ratio for a shape move alpha_cur -> alpha_prop.
double shape_mh_log_ratio(double alpha_cur, double alpha_prop, double beta_k, int r_k,
                          double sum_log_theta, double lambda_eff, double t);

void update_x(DeconvState& st, const std::vector<NoisyObservation>& data, Rng& rng);
void update_theta(DeconvState& st, Rng& rng);
void update_alloc(DeconvState& st, Rng& rng);
void update_weights(DeconvState& st, const DeconvPrior& prior, int J, Rng& rng);
void update_rates(DeconvState& st, const DeconvPrior& prior, int J, Rng& rng);
void update_rates(DeconvState& st, const DeconvPrior& prior, int J, Rng& rng,
                  bool fractionate_beta);
/// Returns the number of accepted shape moves (out of K).
int update_shapes_mh(DeconvState& st, const DeconvPrior& prior, int J, Rng& rng);

/* Closed-form latent density of a state:
   f(x) = sum_k p_k [beta_k / (2 (alpha_k - 1))] (1 - GammaCDF(|x|; alpha_k - 1, beta_k)).
   Throws ShapeAtBoundary when any alpha_k <= 1. */
double deconv_density_at(const std::vector<double>& p, const std::vector<double>& alpha,
                         const std::vector<double>& beta, double x);
DensityGrid density_from_state(const DeconvState& st, const DensityGrid& grid);

ChainDraws run_deconv_chain(const std::vector<NoisyObservation>& data, const DeconvPrior& prior,
                            int J, const GibbsConfig& cfg, const DensityGrid& grid,
                            std::uint64_t seed, bool fractionate_beta = true);

}  // namespace dcd
