#include "dcd/dpmn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dcd/stats.hpp"

namespace dcd {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kTailMassFlag = 1e-4;

double mass_eff(const DpmnPrior& prior, int J) { return prior.mass / static_cast<double>(J); }

}  // namespace

std::vector<double> DpmnState::weights() const {
  const int H = this->H();
  std::vector<double> w(static_cast<std::size_t>(H));
  double rest = 1.0;
  for (int h = 0; h < H; ++h) {
    w[static_cast<std::size_t>(h)] = sticks[static_cast<std::size_t>(h)] * rest;
    rest *= 1.0 - sticks[static_cast<std::size_t>(h)];
  }
  return w;
}

double DpmnState::tail_mass() const {
  double rest = 1.0;
  for (int h = 0; h + 1 < H(); ++h) rest *= 1.0 - sticks[static_cast<std::size_t>(h)];
  return rest;  // mass the forced V_H = 1 stick absorbs
}

std::vector<double> dpmn_alloc_probs(const DpmnState& st, double x) {
  const int H = st.H();
  std::vector<double> w = st.weights();
  std::vector<double> lw(static_cast<std::size_t>(H));
  double lsig = std::log(st.sigma2);
  double m = -kInf;
  for (int h = 0; h < H; ++h) {
    double d = x - st.atoms[static_cast<std::size_t>(h)];
    lw[h] = (w[h] > 0.0 ? std::log(w[h]) : -kInf) - 0.5 * kLog2Pi - 0.5 * lsig -
            0.5 * d * d / st.sigma2;
    m = std::max(m, lw[h]);
  }
  if (std::isinf(m) || std::isnan(m))
    throw DegenerateLikelihood("dpmn_alloc_probs: zero likelihood under every atom");
  double s = 0.0;
  std::vector<double> pr(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) {
    pr[h] = std::exp(lw[h] - m);
    s += pr[h];
  }
  for (double& v : pr) v /= s;
  return pr;
}

void stick_conditional(const std::vector<int>& counts, int h, double mass, double* a, double* b) {
  const int H = static_cast<int>(counts.size());
  double tail = 0.0;
  for (int l = h + 1; l < H; ++l) tail += counts[static_cast<std::size_t>(l)];
  *a = 1.0 + counts[static_cast<std::size_t>(h)];
  *b = mass + tail;
}

void atom_conditional(const std::vector<double>& data, const std::vector<int>& z, int h,
                      double sigma2, const DpmnPrior& prior, int /*J*/, double* mean,
                      double* var) {
  double nh = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (z[i] == h) {
      nh += 1.0;
      sum += data[i];
    }
  }
  double prec = 1.0 / prior.s02 + nh / sigma2;
  *var = 1.0 / prec;
  *mean = (prior.m0 / prior.s02 + sum / sigma2) / prec;
}

InvGammaParams sigma2_conditional(const std::vector<double>& data, const std::vector<int>& z,
                                  const std::vector<double>& atoms, const DpmnPrior& prior,
                                  int J) {
  const double Jd = static_cast<double>(J);
  // inverse-gamma 1/J power rule applied to the prior, then conjugate update
  double a_eff = prior.ig_shape / Jd - (Jd - 1.0) / Jd;
  double b_eff = prior.ig_scale / Jd;
  double ss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double d = data[i] - atoms[static_cast<std::size_t>(z[i])];
    ss += d * d;
  }
  return {a_eff + 0.5 * static_cast<double>(data.size()), b_eff + 0.5 * ss};
}

void update_alloc(DpmnState& st, const std::vector<double>& data, Rng& rng) {
  const int H = st.H();
  std::vector<double> w = st.weights();
  std::vector<double> lc(static_cast<std::size_t>(H));
  double lsig = std::log(st.sigma2);
  for (int h = 0; h < H; ++h)
    lc[h] = (w[static_cast<std::size_t>(h)] > 0.0 ? std::log(w[static_cast<std::size_t>(h)])
                                                  : -kInf) -
            0.5 * kLog2Pi - 0.5 * lsig;
  std::vector<double> lw(static_cast<std::size_t>(H));
  for (std::size_t i = 0; i < data.size(); ++i) {
    double m = -kInf;
    for (int h = 0; h < H; ++h) {
      double d = data[i] - st.atoms[static_cast<std::size_t>(h)];
      lw[h] = lc[h] - 0.5 * d * d / st.sigma2;
      if (lw[h] > m) m = lw[h];
    }
    if (std::isinf(m) || std::isnan(m))
      throw DegenerateLikelihood("dpmn update_alloc: zero likelihood under every atom");
    double s = 0.0;
    for (int h = 0; h < H; ++h) {
      lw[h] = std::exp(lw[h] - m);
      s += lw[h];
    }
    double u = rng.uniform() * s;
    double c = 0.0;
    int zi = H - 1;
    for (int h = 0; h < H; ++h) {
      c += lw[h];
      if (u < c) {
        zi = h;
        break;
      }
    }
    st.z[i] = zi;
  }
}

void update_sticks(DpmnState& st, const DpmnPrior& prior, int J, Rng& rng) {
  const int H = st.H();
  std::vector<int> counts(static_cast<std::size_t>(H), 0);
  for (int zi : st.z) counts[static_cast<std::size_t>(zi)]++;
  double mass = mass_eff(prior, J);
  for (int h = 0; h + 1 < H; ++h) {
    double a, b;
    stick_conditional(counts, h, mass, &a, &b);
    st.sticks[static_cast<std::size_t>(h)] = sample_beta(a, b, rng);
  }
  st.sticks[static_cast<std::size_t>(H - 1)] = 1.0;
}

void update_atoms(DpmnState& st, const std::vector<double>& data, const DpmnPrior& prior, int J,
                  Rng& rng) {
  const int H = st.H();
  // one pass for the per-atom counts and sums
  std::vector<double> nh(static_cast<std::size_t>(H), 0.0), sum(static_cast<std::size_t>(H), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    nh[static_cast<std::size_t>(st.z[i])] += 1.0;
    sum[static_cast<std::size_t>(st.z[i])] += data[i];
  }
  (void)J;
  for (int h = 0; h < H; ++h) {
    double prec = 1.0 / prior.s02 + nh[static_cast<std::size_t>(h)] / st.sigma2;
    double mean = (prior.m0 / prior.s02 + sum[static_cast<std::size_t>(h)] / st.sigma2) / prec;
    st.atoms[static_cast<std::size_t>(h)] = mean + std::sqrt(1.0 / prec) * rng.normal();
  }
}

void update_sigma(DpmnState& st, const std::vector<double>& data, const DpmnPrior& prior, int J,
                  Rng& rng) {
  InvGammaParams cond = sigma2_conditional(data, st.z, st.atoms, prior, J);
  if (!cond.proper())
    throw ImproperConditional("dpmn update_sigma: conditional inverse-gamma improper");
  st.sigma2 = sample_invgamma(cond, rng);
}

DensityGrid dpmn_density(const DpmnState& st, const DensityGrid& grid) {
  if (grid.two_d()) throw GridMismatch("dpmn_density: univariate model needs a 1-D grid");
  const int H = st.H();
  std::vector<double> w = st.weights();
  DensityGrid out = grid;
  double norm = 1.0 / std::sqrt(2.0 * 3.14159265358979323846 * st.sigma2);
  for (std::size_t i = 0; i < grid.xs.size(); ++i) {
    double f = 0.0;
    for (int h = 0; h < H; ++h) {
      double d = grid.xs[i] - st.atoms[static_cast<std::size_t>(h)];
      f += w[static_cast<std::size_t>(h)] * norm * std::exp(-0.5 * d * d / st.sigma2);
    }
    out.v[i] = f;
  }
  return out;
}

ChainDraws run_dpmn_chain(const std::vector<double>& data, const DpmnPrior& prior, int J,
                          const GibbsConfig& cfg, const DensityGrid& grid, std::uint64_t seed,
                          int trunc_H) {
  if (trunc_H < 2) throw ImproperDistribution("run_dpmn_chain: truncation level must be >= 2");
  if (data.empty()) throw DegenerateLikelihood("run_dpmn_chain: empty shard");
  Rng rng(seed);
  const int H = trunc_H;

  DpmnState st;
  st.sticks.resize(static_cast<std::size_t>(H));
  st.atoms.resize(static_cast<std::size_t>(H));
  double mass = mass_eff(prior, J);
  for (int h = 0; h + 1 < H; ++h)
    st.sticks[static_cast<std::size_t>(h)] = sample_beta(1.0, std::max(mass, 1e-8), rng);
  st.sticks[static_cast<std::size_t>(H - 1)] = 1.0;
  for (int h = 0; h < H; ++h)
    st.atoms[static_cast<std::size_t>(h)] = prior.m0 + std::sqrt(prior.s02) * rng.normal();
  double meanv = std::accumulate(data.begin(), data.end(), 0.0) / data.size();
  double ss = 0.0;
  for (double x : data) ss += (x - meanv) * (x - meanv);
  st.sigma2 = data.size() > 1 ? std::max(ss / (data.size() - 1), 1e-8) : 1.0;
  st.z.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    st.z[i] = std::min(H - 1, static_cast<int>(rng.uniform() * H));

  ChainDraws out;
  out.seed = seed;
  out.param_names = {"sigma2", "tail_mass"};
  out.densities.reserve(static_cast<std::size_t>(cfg.retained()));
  for (int it = 1; it <= cfg.iters; ++it) {
    update_alloc(st, data, rng);
    update_sticks(st, prior, J, rng);
    update_atoms(st, data, prior, J, rng);
    update_sigma(st, data, prior, J, rng);
    if (it > cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
      double tm = st.tail_mass();
      if (tm > kTailMassFlag) out.diag.tail_mass_flags++;
      out.densities.push_back(dpmn_density(st, grid));
      out.params.push_back({st.sigma2, tm});
    }
  }
  return out;
}

}  // namespace dcd
