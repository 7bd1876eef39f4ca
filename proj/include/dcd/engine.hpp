#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcd/deconv.hpp"
#include "dcd/dpmn.hpp"
#include "dcd/finite_mixture.hpp"

namespace dcd {

enum class Model { kFinite, kDpmn, kDeconv };

std::string to_string(Model m);
std::string to_string(PriorMode m);
Model model_from_string(const std::string& s);
PriorMode mode_from_string(const std::string& s);

/* Deterministic partition of n observations into J shards: a seeded shuffle
   followed by a balanced split (sizes differ by at most one). Shard seeds are
   derived sub-streams of the master seed, so shard chains are independent of
   scheduling. */
struct ShardPlan {
  int J = 1;
  std::uint64_t master_seed = 0;
  std::vector<int> assignment;        // observation index -> shard
  std::vector<std::uint64_t> seeds;   // one per shard
  bool oversharded = false;           // J > 3 log(n); advisory only

  [[nodiscard]] std::vector<int> sizes() const;
};

ShardPlan make_shard_plan(std::size_t n, int J, std::uint64_t master_seed);

std::vector<ChainDraws> run_shards(const Eigen::MatrixXd& data, const FiniteMixturePrior& prior,
                                   const ShardPlan& plan, PriorMode mode, const GibbsConfig& cfg,
                                   const DensityGrid& grid, int threads = 1);
std::vector<ChainDraws> run_shards(const std::vector<double>& data, const DpmnPrior& prior,
                                   const ShardPlan& plan, PriorMode mode, const GibbsConfig& cfg,
                                   const DensityGrid& grid, int threads = 1, int trunc_H = 50);
std::vector<ChainDraws> run_shards(const std::vector<NoisyObservation>& data,
                                   const DeconvPrior& prior, const ShardPlan& plan,
                                   PriorMode mode, const GibbsConfig& cfg,
                                   const DensityGrid& grid, int threads = 1,
                                   bool fractionate_beta = true);

/// Average over shards of the per-shard posterior-mean density.
DensityGrid combine_mean_density(const std::vector<ChainDraws>& shards);

/// Draw-level combination: draw i of the result averages one retained draw per
/// shard. kAligned pairs draws by index; kShuffled permutes each shard first.
enum class Pairing { kAligned, kShuffled };
std::vector<DensityGrid> combine_draw_level(const std::vector<ChainDraws>& shards,
                                            Pairing pairing, Rng& rng);

/// Average across shards of per-shard posterior parameter means.
std::vector<double> combine_param_means(const std::vector<ChainDraws>& shards);

}  // namespace dcd
