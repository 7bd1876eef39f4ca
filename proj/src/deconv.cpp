#include "dcd/deconv.hpp"

#include <algorithm>
#include <cmath>

#include "dcd/stats.hpp"

namespace dcd {

namespace {

struct EffectivePrior {
  double cell_alpha;  // Dirichlet parameter mass_eff / K
  double lambda_eff;
  double xi1_eff;
  double xi2_eff;
};

EffectivePrior effective_prior(const DeconvPrior& prior, int J, bool fractionate_beta) {
  const double Jd = static_cast<double>(J);
  EffectivePrior e;
  e.cell_alpha = prior.dp_mass / (Jd * prior.K);
  e.lambda_eff = prior.lambda / Jd;
  if (J > 1 && fractionate_beta) {
    e.xi1_eff = (prior.xi1 + Jd - 1.0) / Jd;
    e.xi2_eff = prior.xi2 / Jd;
  } else {
    e.xi1_eff = prior.xi1;
    e.xi2_eff = prior.xi2;
  }
  return e;
}

/// log unnormalized MH target for a component shape.
double shape_log_target(double a, double beta_k, int r_k, double sum_log_theta,
                        double lambda_eff) {
  return -static_cast<double>(r_k) * std::lgamma(a) -
         a * (lambda_eff - static_cast<double>(r_k) * std::log(beta_k) - sum_log_theta);
}

}  // namespace

std::vector<double> deconv_alloc_probs(const DeconvState& st, double theta_i) {
  const std::size_t K = st.p.size();
  std::vector<double> lw(K);
  double m = -kInf;
  double lt = std::log(theta_i);
  for (std::size_t k = 0; k < K; ++k) {
    lw[k] = (st.p[k] > 0.0 ? std::log(st.p[k]) : -kInf) + st.alpha[k] * std::log(st.beta[k]) -
            std::lgamma(st.alpha[k]) + st.alpha[k] * lt - st.beta[k] * theta_i;
    m = std::max(m, lw[k]);
  }
  if (std::isinf(m) || std::isnan(m))
    throw DegenerateLikelihood("deconv_alloc_probs: zero likelihood under every component");
  std::vector<double> pr(K);
  double s = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    pr[k] = std::exp(lw[k] - m);
    s += pr[k];
  }
  for (double& v : pr) v /= s;
  return pr;
}

double shape_mh_log_ratio(double alpha_cur, double alpha_prop, double beta_k, int r_k,
                          double sum_log_theta, double lambda_eff, double t) {
  double lr = shape_log_target(alpha_prop, beta_k, r_k, sum_log_theta, lambda_eff) -
              shape_log_target(alpha_cur, beta_k, r_k, sum_log_theta, lambda_eff);
  // proposal Ga(2, 2/alpha) truncated to (t, inf), centered at the current value
  lr += log_density_truncated_gamma(2.0, 2.0 / alpha_prop, t, kInf, alpha_cur) -
        log_density_truncated_gamma(2.0, 2.0 / alpha_cur, t, kInf, alpha_prop);
  return lr;
}

void update_x(DeconvState& st, const std::vector<NoisyObservation>& data, Rng& rng) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    TruncNormalParams tp{data[i].w, data[i].sigma, -st.theta[i], st.theta[i]};
    st.x[i] = sample_truncated_normal(tp, rng);
  }
}

void update_theta(DeconvState& st, Rng& rng) {
  for (std::size_t i = 0; i < st.x.size(); ++i) {
    std::size_t k = static_cast<std::size_t>(st.z[i]);
    double shape = st.alpha[k] - 1.0;
    if (!(shape > 0.0))
      throw ShapeAtBoundary("update_theta: component shape must exceed 1");
    st.theta[i] = sample_truncated_gamma(shape, st.beta[k], std::abs(st.x[i]), kInf, rng);
  }
}

void update_alloc(DeconvState& st, Rng& rng) {
  const std::size_t K = st.p.size();
  // per-component constants for this sweep
  std::vector<double> lc(K);
  for (std::size_t k = 0; k < K; ++k)
    lc[k] = (st.p[k] > 0.0 ? std::log(st.p[k]) : -kInf) + st.alpha[k] * std::log(st.beta[k]) -
            std::lgamma(st.alpha[k]);
  std::vector<double> lw(K);
  for (std::size_t i = 0; i < st.theta.size(); ++i) {
    double lt = std::log(st.theta[i]);
    double m = -kInf;
    for (std::size_t k = 0; k < K; ++k) {
      lw[k] = lc[k] + st.alpha[k] * lt - st.beta[k] * st.theta[i];
      if (lw[k] > m) m = lw[k];
    }
    if (std::isinf(m) || std::isnan(m))
      throw DegenerateLikelihood("deconv update_alloc: zero likelihood under every component");
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      lw[k] = std::exp(lw[k] - m);
      s += lw[k];
    }
    double u = rng.uniform() * s;
    double c = 0.0;
    int zi = static_cast<int>(K) - 1;
    for (std::size_t k = 0; k < K; ++k) {
      c += lw[k];
      if (u < c) {
        zi = static_cast<int>(k);
        break;
      }
    }
    st.z[i] = zi;
  }
}

void update_weights(DeconvState& st, const DeconvPrior& prior, int J, Rng& rng) {
  EffectivePrior e = effective_prior(prior, J, true);
  DirichletParams cond;
  cond.alpha.assign(st.p.size(), e.cell_alpha);
  for (int zi : st.z) cond.alpha[static_cast<std::size_t>(zi)] += 1.0;
  st.p = sample_dirichlet(cond, rng);
}

void update_rates(DeconvState& st, const DeconvPrior& prior, int J, Rng& rng) {
  update_rates(st, prior, J, rng, true);
}

void update_rates(DeconvState& st, const DeconvPrior& prior, int J, Rng& rng,
                  bool fractionate_beta) {
  EffectivePrior e = effective_prior(prior, J, fractionate_beta);
  const std::size_t K = st.p.size();
  std::vector<int> r(K, 0);
  std::vector<double> s(K, 0.0);
  for (std::size_t i = 0; i < st.theta.size(); ++i) {
    r[static_cast<std::size_t>(st.z[i])]++;
    s[static_cast<std::size_t>(st.z[i])] += st.theta[i];
  }
  for (std::size_t k = 0; k < K; ++k)
    st.beta[k] = sample_gamma(e.xi1_eff + st.alpha[k] * r[k], e.xi2_eff + s[k], rng);
}

int update_shapes_mh(DeconvState& st, const DeconvPrior& prior, int J, Rng& rng) {
  EffectivePrior e = effective_prior(prior, J, true);
  const std::size_t K = st.p.size();
  std::vector<int> r(K, 0);
  std::vector<double> slt(K, 0.0);
  for (std::size_t i = 0; i < st.theta.size(); ++i) {
    r[static_cast<std::size_t>(st.z[i])]++;
    slt[static_cast<std::size_t>(st.z[i])] += std::log(st.theta[i]);
  }
  int accepted = 0;
  for (std::size_t k = 0; k < K; ++k) {
    double cur = st.alpha[k];
    double prop = sample_truncated_gamma(2.0, 2.0 / cur, prior.t, kInf, rng);
    double lr = shape_mh_log_ratio(cur, prop, st.beta[k], r[k], slt[k], e.lambda_eff, prior.t);
    if (std::log(1.0 - rng.uniform()) < lr) {
      st.alpha[k] = prop;
      ++accepted;
    }
  }
  return accepted;
}

double deconv_density_at(const std::vector<double>& p, const std::vector<double>& alpha,
                         const std::vector<double>& beta, double x) {
  double f = 0.0;
  double ax = std::abs(x);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(alpha[k] > 1.0))
      throw ShapeAtBoundary("deconv density: component shape must exceed 1");
    f += p[k] * 0.5 * beta[k] / (alpha[k] - 1.0) * (1.0 - gamma_cdf(ax, alpha[k] - 1.0, beta[k]));
  }
  return f;
}

DensityGrid density_from_state(const DeconvState& st, const DensityGrid& grid) {
  if (grid.two_d()) throw GridMismatch("density_from_state: univariate model needs a 1-D grid");
  DensityGrid out = grid;
  const std::size_t n = grid.xs.size();
  const std::size_t K = st.p.size();
  std::vector<double> c(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (!(st.alpha[k] > 1.0))
      throw ShapeAtBoundary("deconv density: component shape must exceed 1");
    c[k] = st.p[k] * 0.5 * st.beta[k] / (st.alpha[k] - 1.0);
  }
  // Each component's term is monotone decreasing in |x|, so sweeping each half
  // of the grid outward from zero lets a component be dropped for the rest of
  // that half once its term falls below the floor. The truncation error per
  // node is under K * kTailFloor, far below quadrature resolution, and most
  // draws concentrate near zero, so the far tail costs almost nothing.
  constexpr double kTailFloor = 1e-18;
  std::size_t split = 0;
  while (split < n && grid.xs[split] < 0.0) ++split;
  auto sweep = [&](std::size_t from, bool leftward) {
    std::vector<char> alive(K, 1);
    std::size_t live = K;
    std::size_t i = from;
    while (true) {
      const double ax = std::abs(grid.xs[i]);
      double f = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        if (!alive[k]) continue;
        double term = c[k] * (1.0 - gamma_cdf(ax, st.alpha[k] - 1.0, st.beta[k]));
        f += term;
        if (term < kTailFloor) {
          alive[k] = 0;
          --live;
        }
      }
      out.v[i] = f;
      if (leftward) {
        if (i == 0) break;
        --i;
      } else {
        if (++i == n) break;
      }
      if (live == 0) {
        // Remaining nodes on this side only lose terms already under the floor.
        while (true) {
          out.v[i] = 0.0;
          if (leftward) {
            if (i == 0) break;
            --i;
          } else {
            if (++i == n) break;
          }
        }
        break;
      }
    }
  };
  if (split > 0) sweep(split - 1, true);
  if (split < n) sweep(split, false);
  return out;
}

ChainDraws run_deconv_chain(const std::vector<NoisyObservation>& data, const DeconvPrior& prior,
                            int J, const GibbsConfig& cfg, const DensityGrid& grid,
                            std::uint64_t seed, bool fractionate_beta) {
  if (data.empty()) throw DegenerateLikelihood("run_deconv_chain: empty shard");
  if (!(prior.t >= 1.0))
    throw ShapeAtBoundary("run_deconv_chain: shape truncation t must be >= 1");
  Rng rng(seed);
  EffectivePrior e = effective_prior(prior, J, fractionate_beta);
  const std::size_t K = static_cast<std::size_t>(prior.K);
  const std::size_t n = data.size();

  DeconvState st;
  st.p.assign(K, 1.0 / static_cast<double>(K));
  st.alpha.resize(K);
  st.beta.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    st.alpha[k] = sample_truncated_exponential(e.lambda_eff, prior.t, kInf, rng);
    st.beta[k] = sample_gamma(e.xi1_eff, e.xi2_eff, rng);
  }
  st.x.resize(n);
  st.theta.resize(n);
  st.z.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.theta[i] = std::abs(data[i].w) + 1.0;
    st.x[i] = data[i].w;
    st.z[i] = std::min(static_cast<int>(K) - 1, static_cast<int>(rng.uniform() * K));
  }

  ChainDraws out;
  out.seed = seed;
  out.param_names.clear();
  for (std::size_t k = 1; k <= K; ++k) out.param_names.push_back("p." + std::to_string(k));
  for (std::size_t k = 1; k <= K; ++k) out.param_names.push_back("alpha." + std::to_string(k));
  for (std::size_t k = 1; k <= K; ++k) out.param_names.push_back("beta." + std::to_string(k));
  out.densities.reserve(static_cast<std::size_t>(cfg.retained()));

  long long accepted = 0;
  for (int it = 1; it <= cfg.iters; ++it) {
    update_x(st, data, rng);
    update_theta(st, rng);
    update_alloc(st, rng);
    update_weights(st, prior, J, rng);
    update_rates(st, prior, J, rng, fractionate_beta);
    accepted += update_shapes_mh(st, prior, J, rng);
    if (it > cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
      out.densities.push_back(density_from_state(st, grid));
      std::vector<double> row;
      row.reserve(3 * K);
      for (double v : st.p) row.push_back(v);
      for (double v : st.alpha) row.push_back(v);
      for (double v : st.beta) row.push_back(v);
      out.params.push_back(std::move(row));
    }
  }
  out.diag.mh_accept_rate =
      static_cast<double>(accepted) / (static_cast<double>(cfg.iters) * static_cast<double>(K));
  out.diag.mh_rate_warning = out.diag.mh_accept_rate < 0.1 || out.diag.mh_accept_rate > 0.7;
  return out;
}

}  // namespace dcd
