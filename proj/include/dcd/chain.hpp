#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcd/grid.hpp"

namespace dcd {

struct GibbsConfig {
  int iters = 2000;
  int burnin = 500;
  int thin = 1;

  [[nodiscard]] int retained() const {
    if (iters <= burnin || thin < 1) return 0;
    return (iters - burnin) / thin;
  }
};

/// Per-chain diagnostics accumulated by run_chain.
struct ChainDiag {
  int dof_clamps = 0;          // improper IW conditionals substituted
  int tail_mass_flags = 0;     // draws with stick mass beyond H above 1e-4
  double mh_accept_rate = -1;  // shape MH acceptance rate, -1 when unused
  bool mh_rate_warning = false;
};

/* Retained output of one shard chain: a density draw per retained sweep on the
   shared grid, plus optional per-draw parameter summaries. */
struct ChainDraws {
  std::vector<DensityGrid> densities;
  std::vector<std::vector<double>> params;  // one row per retained draw
  std::vector<std::string> param_names;
  std::uint64_t seed = 0;
  ChainDiag diag;
};

}  // namespace dcd
