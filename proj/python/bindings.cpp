// Python bindings for the density-estimation toolkit: simulation, prior
// fractionation, shard execution, combination, and metrics.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcd/engine.hpp"
#include "dcd/io.hpp"
#include "dcd/metrics.hpp"
#include "dcd/priors.hpp"
#include "dcd/simulate.hpp"

namespace py = pybind11;
using namespace dcd;

namespace {

std::vector<NoisyObservation> zip_obs(const std::vector<double>& w,
                                      const std::vector<double>& sigma) {
  if (w.size() != sigma.size())
    throw std::invalid_argument("w and sigma must have equal length");
  std::vector<NoisyObservation> obs(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) obs[i] = {w[i], sigma[i]};
  return obs;
}

RegionSpec region_from(const std::string& name, double cutoff) {
  if (name == "all") return RegionSpec::all();
  if (name == "above") return RegionSpec::abs_above(cutoff);
  if (name == "below") return RegionSpec::abs_below(cutoff);
  throw std::invalid_argument("region must be all, above, or below");
}

}  // namespace

PYBIND11_MODULE(_dcdensity, m) {
  m.doc() = "divide-and-conquer Bayesian density estimation";

  py::class_<DensityGrid>(m, "DensityGrid")
      .def_readonly("xs", &DensityGrid::xs)
      .def_readonly("ys", &DensityGrid::ys)
      .def_readonly("v", &DensityGrid::v)
      .def("two_d", &DensityGrid::two_d)
      .def("size", &DensityGrid::size)
      .def("integral", &DensityGrid::integral)
      .def("normalize", &DensityGrid::normalize)
      .def("__len__", &DensityGrid::size);
  m.def("make_grid", &make_grid, py::arg("lo"), py::arg("hi"), py::arg("points"));
  m.def("make_grid2", &make_grid2, py::arg("xlo"), py::arg("xhi"), py::arg("nx"),
        py::arg("ylo"), py::arg("yhi"), py::arg("ny"));
  m.def("default_grid_1d", &default_grid_1d, py::arg("data"), py::arg("points") = 1001);

  py::class_<GibbsConfig>(m, "GibbsConfig")
      .def(py::init([](int iters, int burnin, int thin) {
             return GibbsConfig{iters, burnin, thin};
           }),
           py::arg("iters") = 2000, py::arg("burnin") = 500, py::arg("thin") = 1)
      .def_readwrite("iters", &GibbsConfig::iters)
      .def_readwrite("burnin", &GibbsConfig::burnin)
      .def_readwrite("thin", &GibbsConfig::thin)
      .def("retained", &GibbsConfig::retained);

  py::class_<ChainDiag>(m, "ChainDiag")
      .def_readonly("dof_clamps", &ChainDiag::dof_clamps)
      .def_readonly("tail_mass_flags", &ChainDiag::tail_mass_flags)
      .def_readonly("mh_accept_rate", &ChainDiag::mh_accept_rate)
      .def_readonly("mh_rate_warning", &ChainDiag::mh_rate_warning);

  py::class_<ChainDraws>(m, "ChainDraws")
      .def_readonly("densities", &ChainDraws::densities)
      .def_readonly("params", &ChainDraws::params)
      .def_readonly("param_names", &ChainDraws::param_names)
      .def_readonly("seed", &ChainDraws::seed)
      .def_readonly("diag", &ChainDraws::diag);

  // priors and fractionation
  py::class_<FiniteMixturePrior>(m, "FiniteMixturePrior")
      .def(py::init<>())
      .def_readwrite("alpha", &FiniteMixturePrior::alpha)
      .def_readwrite("l", &FiniteMixturePrior::l)
      .def_readwrite("nu", &FiniteMixturePrior::nu)
      .def_readwrite("S", &FiniteMixturePrior::S)
      .def("K", &FiniteMixturePrior::K);
  py::class_<DpmnPrior>(m, "DpmnPrior")
      .def(py::init<>())
      .def_readwrite("mass", &DpmnPrior::mass)
      .def_readwrite("m0", &DpmnPrior::m0)
      .def_readwrite("s02", &DpmnPrior::s02)
      .def_readwrite("ig_shape", &DpmnPrior::ig_shape)
      .def_readwrite("ig_scale", &DpmnPrior::ig_scale);
  py::class_<DeconvPrior>(m, "DeconvPrior")
      .def(py::init<>())
      .def_readwrite("K", &DeconvPrior::K)
      .def_readwrite("dp_mass", &DeconvPrior::dp_mass)
      .def_readwrite("lambda_", &DeconvPrior::lambda)
      .def_readwrite("t", &DeconvPrior::t)
      .def_readwrite("xi1", &DeconvPrior::xi1)
      .def_readwrite("xi2", &DeconvPrior::xi2);
  m.def("fractionate_finite", &fractionate_finite, py::arg("prior"), py::arg("J"),
        py::arg("p"));
  m.def("fractionate_dpmn", &fractionate_dpmn, py::arg("prior"), py::arg("J"));
  m.def("fractionate_deconv", &fractionate_deconv, py::arg("prior"), py::arg("J"),
        py::arg("fractionate_beta") = true);

  // simulation designs
  m.def("gen_sim1", &gen_sim1, py::arg("n"), py::arg("seed"));
  m.def("sim1_prior", &sim1_prior);
  m.def("sim1_truth_params", &sim1_truth_params);
  m.def("sim1_truth_density", &sim1_truth_density, py::arg("grid"));
  m.def(
      "gen_sim2",
      [](std::size_t n, std::uint64_t seed) {
        Sim2Data d = gen_sim2(n, seed);
        py::dict out;
        out["w"] = d.w;
        out["sigma"] = d.sigma;
        out["x_true"] = d.x_true;
        return out;
      },
      py::arg("n"), py::arg("seed"));
  m.def("sim2_truth_pdf", &sim2_truth_pdf, py::arg("x"));
  m.def("sim2_truth_density", &sim2_truth_density, py::arg("grid"));
  m.def("ingest_gwas", [](const std::string& path) {
    auto obs = ingest_gwas(path);
    std::vector<std::pair<double, double>> out(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) out[i] = {obs[i].w, obs[i].sigma};
    return out;
  });

  // shard planning and execution
  py::class_<ShardPlan>(m, "ShardPlan")
      .def_readonly("J", &ShardPlan::J)
      .def_readonly("master_seed", &ShardPlan::master_seed)
      .def_readonly("assignment", &ShardPlan::assignment)
      .def_readonly("seeds", &ShardPlan::seeds)
      .def_readonly("oversharded", &ShardPlan::oversharded)
      .def("sizes", &ShardPlan::sizes);
  m.def("make_shard_plan", &make_shard_plan, py::arg("n"), py::arg("J"),
        py::arg("master_seed"));

  m.def(
      "run_shards_finite",
      [](const Eigen::MatrixXd& data, const FiniteMixturePrior& prior, const ShardPlan& plan,
         const std::string& mode, const GibbsConfig& cfg, const DensityGrid& grid,
         int threads) {
        return run_shards(data, prior, plan, mode_from_string(mode), cfg, grid, threads);
      },
      py::arg("data"), py::arg("prior"), py::arg("plan"), py::arg("mode"), py::arg("cfg"),
      py::arg("grid"), py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_shards_dpmn",
      [](const std::vector<double>& data, const DpmnPrior& prior, const ShardPlan& plan,
         const std::string& mode, const GibbsConfig& cfg, const DensityGrid& grid,
         int threads, int trunc_H) {
        return run_shards(data, prior, plan, mode_from_string(mode), cfg, grid, threads,
                          trunc_H);
      },
      py::arg("data"), py::arg("prior"), py::arg("plan"), py::arg("mode"), py::arg("cfg"),
      py::arg("grid"), py::arg("threads") = 1, py::arg("trunc_H") = 50,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_shards_deconv",
      [](const std::vector<double>& w, const std::vector<double>& sigma,
         const DeconvPrior& prior, const ShardPlan& plan, const std::string& mode,
         const GibbsConfig& cfg, const DensityGrid& grid, int threads,
         bool fractionate_beta) {
        auto obs = zip_obs(w, sigma);
        return run_shards(obs, prior, plan, mode_from_string(mode), cfg, grid, threads,
                          fractionate_beta);
      },
      py::arg("w"), py::arg("sigma"), py::arg("prior"), py::arg("plan"), py::arg("mode"),
      py::arg("cfg"), py::arg("grid"), py::arg("threads") = 1,
      py::arg("fractionate_beta") = true, py::call_guard<py::gil_scoped_release>());

  // combination
  m.def("combine_mean_density", &combine_mean_density, py::arg("shards"));
  m.def(
      "combine_draw_level",
      [](const std::vector<ChainDraws>& shards, const std::string& pairing,
         std::uint64_t seed) {
        Rng rng(seed);
        Pairing p = pairing == "shuffled" ? Pairing::kShuffled : Pairing::kAligned;
        return combine_draw_level(shards, p, rng);
      },
      py::arg("shards"), py::arg("pairing") = "aligned", py::arg("seed") = 1);
  m.def("combine_param_means", &combine_param_means, py::arg("shards"));

  // metrics
  m.def("hellinger", &hellinger, py::arg("a"), py::arg("b"));
  m.def("w2_to_point", &w2_to_point, py::arg("draws"), py::arg("f0"));
  m.def(
      "iad",
      [](const DensityGrid& a, const DensityGrid& b, const std::string& region,
         double cutoff) { return iad(a, b, region_from(region, cutoff)); },
      py::arg("a"), py::arg("b"), py::arg("region") = "all", py::arg("cutoff") = 0.0);
  m.def(
      "param_table",
      [](const std::vector<std::vector<double>>& reps, const std::vector<double>& truth,
         const std::vector<std::string>& names) {
        ParamTable t = param_table(reps, truth, names);
        py::dict out;
        out["names"] = t.names;
        out["bias"] = t.bias;
        out["sd"] = t.sd;
        out["se"] = t.se;
        return out;
      },
      py::arg("replications"), py::arg("truth"),
      py::arg("names") = std::vector<std::string>{});

  m.attr("__version__") = "0.1.0";
}
