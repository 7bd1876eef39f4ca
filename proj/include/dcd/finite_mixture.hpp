#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dcd/chain.hpp"
#include "dcd/priors.hpp"
#include "dcd/rng.hpp"

namespace dcd {

/* Blocked Gibbs sampler for a K-component multivariate normal mixture under
   the fractionated prior, following the shard-level conditionals:

     Z_i   ~ Cat( pi_k N_p(x_i; mu_k, Sigma_k) )
     Sigma_k ~ IW( n_k + (nu+1)/J - (p+1)(J-1)/J,
                   V_k + ((lJ)^-1 n_k / ((lJ)^-1 + n_k)) xbar xbar' + S/J )
     mu_k  ~ N_p( n_k/((lJ)^-1 + n_k) xbar, Sigma_k / ((lJ)^-1 + n_k) )
     pi    ~ Dir( n_1 + alpha_1/J, ..., n_K + alpha_K/J )

   J = 1 gives the full/naive (unfractionated) sampler. Sweep order is
   alloc -> Sigma -> mu -> pi. */

struct FiniteMixtureState {
  std::vector<double> pi;
  std::vector<Eigen::VectorXd> mu;
  std::vector<Eigen::MatrixXd> sigma;
  std::vector<int> z;
};

struct FiniteOptions {
  /* Empty or tiny components can push the IW conditional dof to p+1 or below;
     when clamp_improper_dof is set the sampler substitutes p+1+clamp_eps and
     counts the event instead of throwing ImproperConditional. */
  bool clamp_improper_dof = false;
  double clamp_eps = 1e-3;
};

// Conditional parameter builders, exposed for oracle tests and bindings.
// `data` is p x n (one observation per column); counts come from state.z.
std::vector<double> alloc_probs(const FiniteMixtureState& st, const Eigen::VectorXd& x);
InvWishartParams covariance_conditional(const Eigen::MatrixXd& data, const std::vector<int>& z,
                                        int k, const FiniteMixturePrior& prior, int J);
MvNormalParams means_conditional(const Eigen::MatrixXd& data, const std::vector<int>& z, int k,
                                 const Eigen::MatrixXd& sigma_k, const FiniteMixturePrior& prior,
                                 int J);
DirichletParams weights_conditional(const std::vector<int>& z, const FiniteMixturePrior& prior,
                                    int J, int K);

void update_alloc(FiniteMixtureState& st, const Eigen::MatrixXd& data, Rng& rng);
int update_covariance(FiniteMixtureState& st, const Eigen::MatrixXd& data,
                      const FiniteMixturePrior& prior, int J, Rng& rng,
                      const FiniteOptions& opt = {});
void update_means(FiniteMixtureState& st, const Eigen::MatrixXd& data,
                  const FiniteMixturePrior& prior, int J, Rng& rng);
void update_weights(FiniteMixtureState& st, const FiniteMixturePrior& prior, int J, Rng& rng);

/// Mixture density of the current state evaluated on a grid (p = 1 or 2).
DensityGrid mixture_density(const FiniteMixtureState& st, const DensityGrid& grid);

/// Parameter vector relabeled by ascending first coordinate of mu_k:
/// pi, mu (p per component), vech(Sigma) per component.
std::vector<double> relabeled_params(const FiniteMixtureState& st);
std::vector<std::string> finite_param_names(int K, int p);

ChainDraws run_finite_chain(const Eigen::MatrixXd& data, const FiniteMixturePrior& prior, int J,
                            const GibbsConfig& cfg, const DensityGrid& grid, std::uint64_t seed);

}  // namespace dcd
