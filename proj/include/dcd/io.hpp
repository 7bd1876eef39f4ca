#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dcd/chain.hpp"
#include "dcd/engine.hpp"

namespace dcd {

/// Doubles are serialized with 17 significant digits so text round-trips are
/// bit exact.
std::string fmt_g17(double x);

/// Linspace spec sufficient to rebuild a grid bitwise.
struct GridSpec {
  bool two_d = false;
  double xlo = 0.0, xhi = 1.0;
  int nx = 1001;
  double ylo = 0.0, yhi = 1.0;
  int ny = 101;
};

DensityGrid grid_from_spec(const GridSpec& spec);
GridSpec spec_from_grid(const DensityGrid& grid);

/* Everything needed to reproduce a fit bitwise: model, prior mode, sharding,
   seeds, iteration counts, resolved grid, prior hyperparameters, data path. */
struct RunManifest {
  Model model = Model::kFinite;
  PriorMode mode = PriorMode::kFull;
  int J = 1;
  std::uint64_t master_seed = 0;
  GibbsConfig cfg;
  GridSpec grid;
  std::string data_path;
  int trunc_H = 50;
  bool fractionate_beta = true;
  FiniteMixturePrior finite_prior;
  DpmnPrior dpmn_prior;
  DeconvPrior deconv_prior;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
void write_manifest(const std::string& path, const RunManifest& m);
RunManifest read_manifest(const std::string& path);

// Density tables: columns x[,y],density.
void write_density_csv(const std::string& path, const DensityGrid& g);
DensityGrid read_density_csv(const std::string& path);

// Per-shard draws: first header row lists grid coordinates ("x" or "x:y"
// tokens), then one row of density values per retained draw.
void write_draws_csv(const std::string& path, const ChainDraws& draws);
std::vector<DensityGrid> read_draws_csv(const std::string& path);

void write_params_csv(const std::string& path, const ChainDraws& draws);
std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_params_csv(
    const std::string& path);

/* Run directory layout: manifest.json, draws-<j>.csv (j = 1..J), and
   params-<j>.csv when the model emits parameter summaries. */
void write_run_dir(const std::string& dir, const RunManifest& m,
                   const std::vector<ChainDraws>& shards);
std::vector<ChainDraws> read_run_draws(const std::string& dir, const RunManifest& m);

void write_sim1_csv(const std::string& path, const Eigen::MatrixXd& data);
Eigen::MatrixXd read_matrix_csv(const std::string& path);  // header x1..xp
void write_sim2_csv(const std::string& path, const std::vector<double>& w,
                    const std::vector<double>& sigma, const std::vector<double>& x_true);

}  // namespace dcd
