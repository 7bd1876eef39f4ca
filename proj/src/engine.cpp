#include "dcd/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

namespace dcd {

std::string to_string(Model m) {
  switch (m) {
    case Model::kFinite: return "finite";
    case Model::kDpmn: return "dpmn";
    case Model::kDeconv: return "deconv";
  }
  return "?";
}

std::string to_string(PriorMode m) {
  switch (m) {
    case PriorMode::kFull: return "full";
    case PriorMode::kNaive: return "naive";
    case PriorMode::kFraction: return "fraction";
  }
  return "?";
}

Model model_from_string(const std::string& s) {
  if (s == "finite") return Model::kFinite;
  if (s == "dpmn") return Model::kDpmn;
  if (s == "deconv") return Model::kDeconv;
  throw ParseError("unknown model '" + s + "' (expected finite, dpmn, or deconv)", 0);
}

PriorMode mode_from_string(const std::string& s) {
  if (s == "full") return PriorMode::kFull;
  if (s == "naive") return PriorMode::kNaive;
  if (s == "fraction") return PriorMode::kFraction;
  throw ParseError("unknown prior mode '" + s + "' (expected full, naive, or fraction)", 0);
}

std::vector<int> ShardPlan::sizes() const {
  std::vector<int> out(static_cast<std::size_t>(J), 0);
  for (int a : assignment) out[static_cast<std::size_t>(a)]++;
  return out;
}

ShardPlan make_shard_plan(std::size_t n, int J, std::uint64_t master_seed) {
  if (J < 1 || static_cast<std::size_t>(J) > n)
    throw InvalidShardCount("shard count must lie in 1.." + std::to_string(n) + ", got " +
                            std::to_string(J));
  ShardPlan plan;
  plan.J = J;
  plan.master_seed = master_seed;
  plan.oversharded = n > 1 && static_cast<double>(J) > 3.0 * std::log(static_cast<double>(n));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(master_seed, 0));
  for (std::size_t i = n; i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    if (j >= i) j = i - 1;
    std::swap(perm[i - 1], perm[j]);
  }

  // contiguous blocks of the permutation; first n % J shards get the extra unit
  plan.assignment.assign(n, 0);
  std::size_t base = n / static_cast<std::size_t>(J);
  std::size_t extra = n % static_cast<std::size_t>(J);
  std::size_t pos = 0;
  for (int s = 0; s < J; ++s) {
    std::size_t len = base + (static_cast<std::size_t>(s) < extra ? 1 : 0);
    for (std::size_t k = 0; k < len; ++k) plan.assignment[perm[pos++]] = s;
  }

  plan.seeds.resize(static_cast<std::size_t>(J));
  for (int s = 0; s < J; ++s)
    plan.seeds[static_cast<std::size_t>(s)] = derive_seed(master_seed, static_cast<std::uint64_t>(s) + 1);
  return plan;
}

namespace {

/// Runs one job per shard on up to `threads` workers; rethrows the first
/// failure as ShardFailure. Results land in shard order regardless of
/// scheduling, so the output is independent of the thread count.
void parallel_shards(int J, int threads, const std::function<void(int)>& job) {
  if (threads < 1) threads = 1;
  threads = std::min(threads, J);
  std::vector<std::string> errors(static_cast<std::size_t>(J));
  std::vector<char> failed(static_cast<std::size_t>(J), 0);
  if (threads == 1) {
    for (int s = 0; s < J; ++s) {
      try {
        job(s);
      } catch (const std::exception& ex) {
        failed[static_cast<std::size_t>(s)] = 1;
        errors[static_cast<std::size_t>(s)] = ex.what();
      }
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        int s = next.fetch_add(1);
        if (s >= J) return;
        try {
          job(s);
        } catch (const std::exception& ex) {
          failed[static_cast<std::size_t>(s)] = 1;
          errors[static_cast<std::size_t>(s)] = ex.what();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::string msg;
  for (int s = 0; s < J; ++s) {
    if (failed[static_cast<std::size_t>(s)]) {
      if (!msg.empty()) msg += "; ";
      msg += "shard " + std::to_string(s + 1) + ": " + errors[static_cast<std::size_t>(s)];
    }
  }
  if (!msg.empty()) throw ShardFailure(msg);
}

void check_mode(PriorMode mode, int J) {
  if (mode == PriorMode::kFull && J != 1)
    throw InvalidShardCount("full-data prior requires a single shard, got J=" +
                            std::to_string(J));
}

/// J value the conditionals should see: fractionated priors scale by the real
/// shard count, the naive scheme pretends each shard is the whole data set.
int effective_j(PriorMode mode, int J) { return mode == PriorMode::kFraction ? J : 1; }

}  // namespace

std::vector<ChainDraws> run_shards(const Eigen::MatrixXd& data, const FiniteMixturePrior& prior,
                                   const ShardPlan& plan, PriorMode mode, const GibbsConfig& cfg,
                                   const DensityGrid& grid, int threads) {
  check_mode(mode, plan.J);
  const int Jeff = effective_j(mode, plan.J);
  std::vector<Eigen::MatrixXd> parts(static_cast<std::size_t>(plan.J));
  std::vector<int> sz = plan.sizes();
  for (int s = 0; s < plan.J; ++s)
    parts[static_cast<std::size_t>(s)].resize(data.rows(), sz[static_cast<std::size_t>(s)]);
  std::vector<int> fill(static_cast<std::size_t>(plan.J), 0);
  for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
    int s = plan.assignment[i];
    parts[static_cast<std::size_t>(s)].col(fill[static_cast<std::size_t>(s)]++) =
        data.col(static_cast<Eigen::Index>(i));
  }
  std::vector<ChainDraws> out(static_cast<std::size_t>(plan.J));
  parallel_shards(plan.J, threads, [&](int s) {
    out[static_cast<std::size_t>(s)] =
        run_finite_chain(parts[static_cast<std::size_t>(s)], prior, Jeff, cfg, grid,
                         plan.seeds[static_cast<std::size_t>(s)]);
  });
  return out;
}

std::vector<ChainDraws> run_shards(const std::vector<double>& data, const DpmnPrior& prior,
                                   const ShardPlan& plan, PriorMode mode, const GibbsConfig& cfg,
                                   const DensityGrid& grid, int threads, int trunc_H) {
  check_mode(mode, plan.J);
  const int Jeff = effective_j(mode, plan.J);
  std::vector<std::vector<double>> parts(static_cast<std::size_t>(plan.J));
  for (std::size_t i = 0; i < plan.assignment.size(); ++i)
    parts[static_cast<std::size_t>(plan.assignment[i])].push_back(data[i]);
  std::vector<ChainDraws> out(static_cast<std::size_t>(plan.J));
  parallel_shards(plan.J, threads, [&](int s) {
    out[static_cast<std::size_t>(s)] =
        run_dpmn_chain(parts[static_cast<std::size_t>(s)], prior, Jeff, cfg, grid,
                       plan.seeds[static_cast<std::size_t>(s)], trunc_H);
  });
  return out;
}

std::vector<ChainDraws> run_shards(const std::vector<NoisyObservation>& data,
                                   const DeconvPrior& prior, const ShardPlan& plan,
                                   PriorMode mode, const GibbsConfig& cfg,
                                   const DensityGrid& grid, int threads, bool fractionate_beta) {
  check_mode(mode, plan.J);
  const int Jeff = effective_j(mode, plan.J);
  std::vector<std::vector<NoisyObservation>> parts(static_cast<std::size_t>(plan.J));
  for (std::size_t i = 0; i < plan.assignment.size(); ++i)
    parts[static_cast<std::size_t>(plan.assignment[i])].push_back(data[i]);
  std::vector<ChainDraws> out(static_cast<std::size_t>(plan.J));
  parallel_shards(plan.J, threads, [&](int s) {
    out[static_cast<std::size_t>(s)] =
        run_deconv_chain(parts[static_cast<std::size_t>(s)], prior, Jeff, cfg, grid,
                         plan.seeds[static_cast<std::size_t>(s)], fractionate_beta);
  });
  return out;
}

namespace {

void check_combinable(const std::vector<ChainDraws>& shards) {
  if (shards.empty()) throw InvalidShardCount("no shard draws to combine");
  for (const auto& sh : shards)
    if (sh.densities.empty())
      throw MissingParams("a shard carries no retained density draws");
  for (std::size_t s = 1; s < shards.size(); ++s)
    require_same_axes(shards[0].densities[0], shards[s].densities[0]);
}

DensityGrid shard_mean_density(const ChainDraws& sh) {
  DensityGrid m = sh.densities[0];
  for (std::size_t d = 1; d < sh.densities.size(); ++d)
    for (std::size_t i = 0; i < m.v.size(); ++i) m.v[i] += sh.densities[d].v[i];
  const double inv = 1.0 / static_cast<double>(sh.densities.size());
  for (double& v : m.v) v *= inv;
  return m;
}

}  // namespace

DensityGrid combine_mean_density(const std::vector<ChainDraws>& shards) {
  check_combinable(shards);
  DensityGrid acc = shard_mean_density(shards[0]);
  for (std::size_t s = 1; s < shards.size(); ++s) {
    DensityGrid m = shard_mean_density(shards[s]);
    for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += m.v[i];
  }
  const double inv = 1.0 / static_cast<double>(shards.size());
  for (double& v : acc.v) v *= inv;
  return acc;
}

std::vector<DensityGrid> combine_draw_level(const std::vector<ChainDraws>& shards,
                                            Pairing pairing, Rng& rng) {
  check_combinable(shards);
  std::size_t R = shards[0].densities.size();
  for (const auto& sh : shards) R = std::min(R, sh.densities.size());

  std::vector<std::vector<std::size_t>> order(shards.size());
  for (std::size_t s = 0; s < shards.size(); ++s) {
    order[s].resize(shards[s].densities.size());
    std::iota(order[s].begin(), order[s].end(), std::size_t{0});
    if (pairing == Pairing::kShuffled) {
      for (std::size_t i = order[s].size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
        if (j >= i) j = i - 1;
        std::swap(order[s][i - 1], order[s][j]);
      }
    }
  }

  std::vector<DensityGrid> out;
  out.reserve(R);
  const double inv = 1.0 / static_cast<double>(shards.size());
  for (std::size_t d = 0; d < R; ++d) {
    DensityGrid g = shards[0].densities[order[0][d]];
    for (std::size_t s = 1; s < shards.size(); ++s) {
      const DensityGrid& add = shards[s].densities[order[s][d]];
      for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] += add.v[i];
    }
    for (double& v : g.v) v *= inv;
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<double> combine_param_means(const std::vector<ChainDraws>& shards) {
  if (shards.empty()) throw InvalidShardCount("no shard draws to combine");
  for (const auto& sh : shards)
    if (sh.params.empty()) throw MissingParams("a shard carries no retained parameter draws");
  const std::size_t P = shards[0].params[0].size();
  for (const auto& sh : shards)
    if (sh.params[0].size() != P)
      throw MissingParams("shards disagree on the parameter dimension");
  std::vector<double> acc(P, 0.0);
  for (const auto& sh : shards) {
    std::vector<double> m(P, 0.0);
    for (const auto& row : sh.params)
      for (std::size_t i = 0; i < P; ++i) m[i] += row[i];
    const double inv = 1.0 / static_cast<double>(sh.params.size());
    for (std::size_t i = 0; i < P; ++i) acc[i] += m[i] * inv;
  }
  const double inv = 1.0 / static_cast<double>(shards.size());
  for (double& v : acc) v *= inv;
  return acc;
}

}  // namespace dcd
