// Command-line front end: data simulation, shard fitting, combination, and
// metric evaluation. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dcd/engine.hpp"
#include "dcd/io.hpp"
#include "dcd/metrics.hpp"
#include "dcd/simulate.hpp"

namespace {

struct FitArgs {
  std::string model = "finite";
  std::string mode = "full";
  int shards = 1;
  std::string data;
  std::string out;
  std::string manifest;
  int iters = 2000;
  int burnin = 500;
  int thin = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  double grid_min = 0.0, grid_max = 0.0;
  int grid_points = 1001;
  double grid2_min = 0.0, grid2_max = 0.0;
  int grid2_points = 101;
  bool grid_given = false, grid2_given = false;
  // finite mixture prior
  int K = 2;
  double alpha = 0.5;
  double l = 100.0;
  double nu = 2.0;
  double s_scale = 4.0;
  // DPMN prior
  double mass = 1.0;
  double m0 = 0.0;
  double s02 = 1.0;
  double ig_shape = 2.0;
  double ig_scale = 2.0;
  int trunc_H = 50;
  // deconvolution prior
  int deconv_K = 30;
  double dp_mass = 1.0;
  double lambda = 1.0;
  double t = 1.5;
  double xi1 = 2.0;
  double xi2 = 0.0;  // <= 0 means: resolve to 2 x robust sd of w
  bool fractionate_beta = true;
};

dcd::GridSpec axis_bounds(const std::vector<double>& xs, int points) {
  double lo = xs[0], hi = xs[0];
  for (double v : xs) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double pad = 3.0 * dcd::robust_sd(xs);
  if (!(pad > 0.0)) pad = 1.0;
  dcd::GridSpec s;
  s.xlo = lo - pad;
  s.xhi = hi + pad;
  s.nx = points;
  return s;
}

void print_diags(const std::vector<dcd::ChainDraws>& shards) {
  long long clamps = 0, tails = 0;
  bool mh_warn = false;
  for (const auto& sh : shards) {
    clamps += sh.diag.dof_clamps;
    tails += sh.diag.tail_mass_flags;
    mh_warn = mh_warn || sh.diag.mh_rate_warning;
  }
  if (clamps > 0)
    std::fprintf(stderr, "note: %lld empty-component covariance conditionals were clamped\n",
                 clamps);
  if (tails > 0)
    std::fprintf(stderr, "note: truncation tail mass exceeded 1e-4 in %lld sweeps\n", tails);
  if (mh_warn)
    std::fprintf(stderr,
                 "warning: shape MH acceptance rate outside [0.1, 0.7] on some shard\n");
}

int run_fit(const FitArgs& a) {
  dcd::RunManifest m;
  bool from_manifest = !a.manifest.empty();
  if (from_manifest) {
    m = dcd::read_manifest(a.manifest);
  } else {
    m.model = dcd::model_from_string(a.model);
    m.mode = dcd::mode_from_string(a.mode);
    m.J = a.shards;
    m.master_seed = a.seed;
    m.cfg = {a.iters, a.burnin, a.thin};
    m.data_path = a.data;
    m.trunc_H = a.trunc_H;
    m.fractionate_beta = a.fractionate_beta;
    m.finite_prior.alpha.assign(static_cast<std::size_t>(a.K), a.alpha);
    m.finite_prior.l = a.l;
    m.finite_prior.nu = a.nu;
    m.dpmn_prior = {a.mass, a.m0, a.s02, a.ig_shape, a.ig_scale};
    m.deconv_prior = {a.deconv_K, a.dp_mass, a.lambda, a.t, a.xi1, a.xi2};
  }
  if (m.mode == dcd::PriorMode::kFull && m.J != 1) {
    std::fprintf(stderr, "error: --mode full requires --shards 1 (got %d)\n", m.J);
    return 2;
  }
  if (m.cfg.retained() <= 0) {
    std::fprintf(stderr, "error: no retained draws (iters %d, burnin %d, thin %d)\n",
                 m.cfg.iters, m.cfg.burnin, m.cfg.thin);
    return 2;
  }

  std::size_t n = 0;
  Eigen::MatrixXd mat;
  std::vector<double> univ;
  std::vector<dcd::NoisyObservation> obs;
  if (m.model == dcd::Model::kFinite) {
    mat = dcd::read_matrix_csv(m.data_path);
    n = static_cast<std::size_t>(mat.cols());
    if (!from_manifest) m.finite_prior.S = a.s_scale * Eigen::MatrixXd::Identity(mat.rows(), mat.rows());
  } else if (m.model == dcd::Model::kDpmn) {
    mat = dcd::read_matrix_csv(m.data_path);
    if (mat.rows() != 1) {
      std::fprintf(stderr, "error: dpmn expects univariate data, got %ld rows\n",
                   static_cast<long>(mat.rows()));
      return 2;
    }
    univ.assign(mat.data(), mat.data() + mat.cols());
    n = univ.size();
  } else {
    obs = dcd::ingest_gwas(m.data_path);
    n = obs.size();
    if (!from_manifest && m.deconv_prior.xi2 <= 0.0) {
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = obs[i].w;
      m.deconv_prior.xi2 = 2.0 * dcd::robust_sd(w);
    }
  }

  if (!from_manifest) {
    if (m.model == dcd::Model::kFinite && mat.rows() == 2) {
      std::vector<double> xs(static_cast<std::size_t>(mat.cols())),
          ys(static_cast<std::size_t>(mat.cols()));
      for (Eigen::Index i = 0; i < mat.cols(); ++i) {
        xs[static_cast<std::size_t>(i)] = mat(0, i);
        ys[static_cast<std::size_t>(i)] = mat(1, i);
      }
      dcd::GridSpec gx = a.grid_given
                             ? dcd::GridSpec{false, a.grid_min, a.grid_max, a.grid_points}
                             : axis_bounds(xs, a.grid_points);
      dcd::GridSpec gy = a.grid2_given
                             ? dcd::GridSpec{false, a.grid2_min, a.grid2_max, a.grid2_points}
                             : axis_bounds(ys, a.grid2_points);
      m.grid.two_d = true;
      m.grid.xlo = gx.xlo;
      m.grid.xhi = gx.xhi;
      m.grid.nx = gx.nx;
      m.grid.ylo = gy.xlo;
      m.grid.yhi = gy.xhi;
      m.grid.ny = gy.nx;
    } else {
      std::vector<double> xs;
      if (m.model == dcd::Model::kFinite) {
        if (mat.rows() != 1) {
          std::fprintf(stderr, "error: density grids support 1- or 2-dimensional data\n");
          return 2;
        }
        xs.assign(mat.data(), mat.data() + mat.cols());
      } else if (m.model == dcd::Model::kDpmn) {
        xs = univ;
      } else {
        xs.resize(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = obs[i].w;
      }
      m.grid = a.grid_given ? dcd::GridSpec{false, a.grid_min, a.grid_max, a.grid_points}
                            : axis_bounds(xs, a.grid_points);
    }
  }

  dcd::ShardPlan plan = dcd::make_shard_plan(n, m.J, m.master_seed);
  if (plan.oversharded)
    std::fprintf(stderr,
                 "warning: %d shards exceeds 3 log(n) = %.1f; shards may be too small for "
                 "stable conditionals\n",
                 m.J, 3.0 * std::log(static_cast<double>(n)));

  dcd::DensityGrid grid = dcd::grid_from_spec(m.grid);
  std::vector<dcd::ChainDraws> shards;
  if (m.model == dcd::Model::kFinite) {
    shards = dcd::run_shards(mat, m.finite_prior, plan, m.mode, m.cfg, grid, a.threads);
  } else if (m.model == dcd::Model::kDpmn) {
    shards = dcd::run_shards(univ, m.dpmn_prior, plan, m.mode, m.cfg, grid, a.threads,
                             m.trunc_H);
  } else {
    shards = dcd::run_shards(obs, m.deconv_prior, plan, m.mode, m.cfg, grid, a.threads,
                             m.fractionate_beta);
  }
  dcd::write_run_dir(a.out, m, shards);
  print_diags(shards);
  std::printf("fit: model=%s mode=%s J=%d n=%zu retained=%d out=%s\n",
              dcd::to_string(m.model).c_str(), dcd::to_string(m.mode).c_str(), m.J, n,
              m.cfg.retained(), a.out.c_str());
  return 0;
}

int run_combine(const std::string& run_dir, const std::string& method,
                const std::string& pairing, std::uint64_t seed, const std::string& out) {
  dcd::RunManifest m = dcd::read_manifest(run_dir + "/manifest.json");
  std::vector<dcd::ChainDraws> shards = dcd::read_run_draws(run_dir, m);
  if (method == "mean") {
    dcd::write_density_csv(out, dcd::combine_mean_density(shards));
  } else {
    dcd::Rng rng(seed);
    dcd::Pairing p = pairing == "shuffled" ? dcd::Pairing::kShuffled : dcd::Pairing::kAligned;
    dcd::ChainDraws combined;
    combined.densities = dcd::combine_draw_level(shards, p, rng);
    dcd::write_draws_csv(out, combined);
  }
  std::printf("combine: method=%s shards=%d out=%s\n", method.c_str(), m.J, out.c_str());
  return 0;
}

int run_metrics(const std::string& a_path, const std::string& b_path,
                const std::string& metric, const std::string& region, double cutoff) {
  dcd::DensityGrid a = dcd::read_density_csv(a_path);
  dcd::DensityGrid b = dcd::read_density_csv(b_path);
  dcd::RegionSpec spec = dcd::RegionSpec::all();
  if (region == "above") spec = dcd::RegionSpec::abs_above(cutoff);
  if (region == "below") spec = dcd::RegionSpec::abs_below(cutoff);
  double value = metric == "iad" ? dcd::iad(a, b, spec) : dcd::hellinger(a, b);
  std::printf("metric,region,value,grid_points\n%s,%s,%s,%zu\n", metric.c_str(),
              spec.name().c_str(), dcd::fmt_g17(value).c_str(), a.size());
  return 0;
}

int run_table(const std::vector<std::string>& runs, const std::string& truth_csv,
              const std::string& out) {
  std::vector<double> truth;
  for (const auto& tok : [&] {
         std::vector<std::string> toks;
         std::string cur;
         for (char c : truth_csv) {
           if (c == ',') {
             toks.push_back(cur);
             cur.clear();
           } else {
             cur += c;
           }
         }
         toks.push_back(cur);
         return toks;
       }()) {
    truth.push_back(std::stod(tok));
  }
  std::vector<std::vector<double>> reps;
  std::vector<std::string> names;
  for (const auto& dir : runs) {
    dcd::RunManifest m = dcd::read_manifest(dir + "/manifest.json");
    std::vector<dcd::ChainDraws> shards = dcd::read_run_draws(dir, m);
    reps.push_back(dcd::combine_param_means(shards));
    if (names.empty() && !shards[0].param_names.empty()) names = shards[0].param_names;
  }
  dcd::ParamTable t = dcd::param_table(reps, truth, names);
  std::string text = "name,bias,sd,se\n";
  for (std::size_t i = 0; i < t.names.size(); ++i)
    text += t.names[i] + "," + dcd::fmt_g17(t.bias[i]) + "," + dcd::fmt_g17(t.sd[i]) + "," +
            dcd::fmt_g17(t.se[i]) + "\n";
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream f(out);
    if (!f) throw dcd::ParseError("cannot open " + out + " for writing", 0);
    f << text;
    std::printf("table: params=%zu replications=%zu out=%s\n", t.names.size(), reps.size(),
                out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divide-and-conquer Bayesian density estimation"};
  app.require_subcommand(1);

  // gen-sim1 / gen-sim2
  std::size_t gen_n = 1000;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* sim1 = app.add_subcommand("gen-sim1", "simulate the bivariate two-component mixture");
  sim1->add_option("--n", gen_n, "sample size");
  sim1->add_option("--seed", gen_seed, "rng seed");
  sim1->add_option("--out", gen_out, "output csv")->required();
  auto* sim2 =
      app.add_subcommand("gen-sim2", "simulate noisy observations of a symmetric density");
  sim2->add_option("--n", gen_n, "sample size");
  sim2->add_option("--seed", gen_seed, "rng seed");
  sim2->add_option("--out", gen_out, "output csv")->required();

  // ingest-check
  std::string ingest_path;
  auto* ingest = app.add_subcommand("ingest-check", "validate a noisy-observation table");
  ingest->add_option("--data", ingest_path, "csv with columns w, sigma")->required();

  // fit
  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "run shard chains and write a run directory");
  fit->add_option("--model", fa.model, "finite | dpmn | deconv");
  fit->add_option("--mode", fa.mode, "full | naive | fraction");
  fit->add_option("--shards", fa.shards, "number of shards J");
  fit->add_option("--data", fa.data, "input data csv");
  fit->add_option("--out", fa.out, "run directory")->required();
  fit->add_option("--manifest", fa.manifest, "rerun an existing manifest (overrides flags)");
  fit->add_option("--iters", fa.iters, "sweeps per chain");
  fit->add_option("--burnin", fa.burnin, "discarded sweeps");
  fit->add_option("--thin", fa.thin, "thinning stride");
  fit->add_option("--seed", fa.seed, "master seed");
  fit->add_option("--threads", fa.threads, "worker threads");
  auto* gmin = fit->add_option("--grid-min", fa.grid_min, "density grid lower edge");
  auto* gmax = fit->add_option("--grid-max", fa.grid_max, "density grid upper edge");
  fit->add_option("--grid-points", fa.grid_points, "density grid size");
  auto* g2min = fit->add_option("--grid2-min", fa.grid2_min, "second-axis lower edge");
  auto* g2max = fit->add_option("--grid2-max", fa.grid2_max, "second-axis upper edge");
  fit->add_option("--grid2-points", fa.grid2_points, "second-axis grid size");
  fit->add_option("--K", fa.K, "finite mixture components");
  fit->add_option("--alpha", fa.alpha, "Dirichlet concentration per component");
  fit->add_option("--l", fa.l, "prior mean covariance multiplier");
  fit->add_option("--nu", fa.nu, "inverse-Wishart shape offset");
  fit->add_option("--s-scale", fa.s_scale, "inverse-Wishart scale = s I");
  fit->add_option("--mass", fa.mass, "DP total mass (dpmn)");
  fit->add_option("--m0", fa.m0, "atom prior mean");
  fit->add_option("--s02", fa.s02, "atom prior variance");
  fit->add_option("--ig-shape", fa.ig_shape, "variance prior shape");
  fit->add_option("--ig-scale", fa.ig_scale, "variance prior scale");
  fit->add_option("--trunc-H", fa.trunc_H, "stick-breaking truncation");
  fit->add_option("--deconv-K", fa.deconv_K, "deconvolution mixture components");
  fit->add_option("--dp-mass", fa.dp_mass, "deconvolution DP mass");
  fit->add_option("--lambda", fa.lambda, "shape prior rate");
  fit->add_option("--t", fa.t, "shape truncation point");
  fit->add_option("--xi1", fa.xi1, "rate prior shape");
  fit->add_option("--xi2", fa.xi2, "rate prior rate (<= 0: 2 x robust sd of w)");
  fit->add_flag("--fractionate-beta,!--no-fractionate-beta", fa.fractionate_beta,
                "apply the power rule to the rate prior under fractionation");

  // combine
  std::string c_run, c_method = "mean", c_pairing = "aligned", c_out;
  std::uint64_t c_seed = 1;
  auto* comb = app.add_subcommand("combine", "average shard draws from a run directory");
  comb->add_option("--run", c_run, "run directory")->required();
  comb->add_option("--method", c_method, "mean | draws");
  comb->add_option("--pairing", c_pairing, "aligned | shuffled (draws only)");
  comb->add_option("--seed", c_seed, "shuffle seed");
  comb->add_option("--out", c_out, "output csv")->required();

  // metrics
  std::string m_a, m_b, m_metric = "hellinger", m_region = "all";
  double m_cutoff = 0.003;
  auto* met = app.add_subcommand("metrics", "distance between two density tables");
  met->add_option("--a", m_a, "density csv")->required();
  met->add_option("--b", m_b, "density csv")->required();
  met->add_option("--metric", m_metric, "hellinger | iad");
  met->add_option("--region", m_region, "all | above | below");
  met->add_option("--cutoff", m_cutoff, "|x| cutoff for above/below");

  // table
  std::vector<std::string> t_runs;
  std::string t_truth, t_out;
  auto* tab = app.add_subcommand("table", "bias/sd/se across replication run directories");
  tab->add_option("--runs", t_runs, "run directories")->required()->expected(-1);
  tab->add_option("--truth", t_truth, "comma-separated truth values")->required();
  tab->add_option("--out", t_out, "output csv (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (sim1->parsed()) {
      dcd::write_sim1_csv(gen_out, dcd::gen_sim1(gen_n, gen_seed));
      std::printf("gen-sim1: n=%zu seed=%llu out=%s\n", gen_n,
                  static_cast<unsigned long long>(gen_seed), gen_out.c_str());
    } else if (sim2->parsed()) {
      dcd::Sim2Data d = dcd::gen_sim2(gen_n, gen_seed);
      dcd::write_sim2_csv(gen_out, d.w, d.sigma, d.x_true);
      std::printf("gen-sim2: n=%zu seed=%llu out=%s\n", gen_n,
                  static_cast<unsigned long long>(gen_seed), gen_out.c_str());
    } else if (ingest->parsed()) {
      auto obs = dcd::ingest_gwas(ingest_path);
      std::vector<double> w(obs.size());
      for (std::size_t i = 0; i < obs.size(); ++i) w[i] = obs[i].w;
      std::printf("ingest-check: rows=%zu robust_sd(w)=%s\n", obs.size(),
                  dcd::fmt_g17(dcd::robust_sd(w)).c_str());
    } else if (fit->parsed()) {
      fa.grid_given = gmin->count() > 0 && gmax->count() > 0;
      fa.grid2_given = g2min->count() > 0 && g2max->count() > 0;
      if (fa.manifest.empty() && fa.data.empty()) {
        std::fprintf(stderr, "error: fit needs --data or --manifest\n");
        return 2;
      }
      return run_fit(fa);
    } else if (comb->parsed()) {
      if (c_method != "mean" && c_method != "draws") {
        std::fprintf(stderr, "error: --method must be mean or draws\n");
        return 2;
      }
      return run_combine(c_run, c_method, c_pairing, c_seed, c_out);
    } else if (met->parsed()) {
      if (m_metric != "hellinger" && m_metric != "iad") {
        std::fprintf(stderr, "error: --metric must be hellinger or iad\n");
        return 2;
      }
      return run_metrics(m_a, m_b, m_metric, m_region, m_cutoff);
    } else if (tab->parsed()) {
      return run_table(t_runs, t_truth, t_out);
    }
  } catch (const dcd::ParseError& ex) {
    std::string where;
    if (ex.line > 0) {
      where = " at line " + std::to_string(ex.line);
      if (ex.column > 0) where += ", column " + std::to_string(ex.column);
    }
    std::fprintf(stderr, "error%s: %s\n", where.c_str(), ex.what());
    return 1;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
