#pragma once

#include <vector>

#include "dcd/chain.hpp"
#include "dcd/priors.hpp"
#include "dcd/rng.hpp"

namespace dcd {

/* Truncated stick-breaking blocked Gibbs for the univariate DP mixture of
   normals with common variance:

     x_i | Z_i = h ~ N(z_h, sigma^2),   pi from sticks V_h, V_H := 1,
     V_h ~ Beta(1 + n_h, mass_eff + sum_{l>h} n_l),
     z_h ~ N over G_0 = N(m0, s02) conjugacy,
     sigma^2 ~ IG(shape_eff + m/2, scale_eff + 0.5 sum (x_i - z_{Z_i})^2).

   mass_eff and the inverse-gamma parameters carry the 1/J fractionation.
   Sweep order is alloc -> sticks -> atoms -> sigma. */

struct DpmnState {
  std::vector<double> sticks;  // V_1..V_H, V_H forced to 1
  std::vector<double> atoms;   // z_1..z_H
  double sigma2 = 1.0;
  std::vector<int> z;

  [[nodiscard]] int H() const { return static_cast<int>(sticks.size()); }
  [[nodiscard]] std::vector<double> weights() const;
  /// Stick mass that would lie beyond H without the V_H = 1 closure.
  [[nodiscard]] double tail_mass() const;
};

std::vector<double> dpmn_alloc_probs(const DpmnState& st, double x);
/// Beta parameters of the stick V_h given allocation counts.
void stick_conditional(const std::vector<int>& counts, int h, double mass_eff, double* a,
                       double* b);
/// Normal conditional of atom h.
void atom_conditional(const std::vector<double>& data, const std::vector<int>& z, int h,
                      double sigma2, const DpmnPrior& prior, int J, double* mean, double* var);
InvGammaParams sigma2_conditional(const std::vector<double>& data, const std::vector<int>& z,
                                  const std::vector<double>& atoms, const DpmnPrior& prior,
                                  int J);

void update_alloc(DpmnState& st, const std::vector<double>& data, Rng& rng);
void update_sticks(DpmnState& st, const DpmnPrior& prior, int J, Rng& rng);
void update_atoms(DpmnState& st, const std::vector<double>& data, const DpmnPrior& prior, int J,
                  Rng& rng);
void update_sigma(DpmnState& st, const std::vector<double>& data, const DpmnPrior& prior, int J,
                  Rng& rng);

DensityGrid dpmn_density(const DpmnState& st, const DensityGrid& grid);

ChainDraws run_dpmn_chain(const std::vector<double>& data, const DpmnPrior& prior, int J,
                          const GibbsConfig& cfg, const DensityGrid& grid, std::uint64_t seed,
                          int trunc_H = 50);

}  // namespace dcd
