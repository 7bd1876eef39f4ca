#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dcd/deconv.hpp"
#include "dcd/grid.hpp"
#include "dcd/priors.hpp"

namespace dcd {

/* Simulation 1: two-component bivariate normal mixture,
   pi = (0.3, 0.7), mu_1 = (1,2)', mu_2 = (7,8)', shared
   Sigma = [[1, 0.5], [0.5, 2]]. */
struct Sim1Truth {
  std::vector<double> pi;
  std::vector<Eigen::VectorXd> mu;
  Eigen::MatrixXd Sigma;
};

Sim1Truth sim1_truth();
/// Prior used with simulation 1: alpha = (1/2, 1/2), l = 100, nu = 2, S = 4 I2.
FiniteMixturePrior sim1_prior();
/// n draws, one observation per column (2 x n).
Eigen::MatrixXd gen_sim1(std::size_t n, std::uint64_t seed);
/// Truth parameter vector in the relabeled layout of the finite sampler.
std::vector<double> sim1_truth_params();
DensityGrid sim1_truth_density(const DensityGrid& grid);

/* Simulation 2: latent X ~ 0.8 N(0, 0.2^2) + 0.2 t_5, observed
   W = X + N(0, sigma_i^2) with sigma_i = max(0.75 + X_i/4, 1e-6). */
struct Sim2Data {
  std::vector<double> w;
  std::vector<double> sigma;
  std::vector<double> x_true;

  [[nodiscard]] std::vector<NoisyObservation> observations() const;
};

Sim2Data gen_sim2(std::size_t n, std::uint64_t seed);
DensityGrid sim2_truth_density(const DensityGrid& grid);
double sim2_truth_pdf(double x);

/// Parse a noisy-observation table with columns id, w, sigma (case- and
/// order-insensitive header; extra columns ignored). Rejects sigma <= 0 and
/// malformed rows with 1-based line numbers.
std::vector<NoisyObservation> ingest_gwas(const std::string& path);

}  // namespace dcd
