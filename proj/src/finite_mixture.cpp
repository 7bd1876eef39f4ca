#include "dcd/finite_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dcd/stats.hpp"

namespace dcd {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct SuffStats {
  std::vector<double> counts;
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> scatter;  // sum (x - xbar)(x - xbar)'
};

SuffStats suff_stats(const Eigen::MatrixXd& data, const std::vector<int>& z, int K) {
  const int p = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  SuffStats s;
  s.counts.assign(K, 0.0);
  s.mean.assign(K, Eigen::VectorXd::Zero(p));
  s.scatter.assign(K, Eigen::MatrixXd::Zero(p, p));
  std::vector<Eigen::VectorXd> sum(K, Eigen::VectorXd::Zero(p));
  std::vector<Eigen::MatrixXd> sq(K, Eigen::MatrixXd::Zero(p, p));
  for (int i = 0; i < n; ++i) {
    int k = z[static_cast<std::size_t>(i)];
    const auto x = data.col(i);
    s.counts[k] += 1.0;
    sum[k] += x;
    sq[k] += x * x.transpose();
  }
  for (int k = 0; k < K; ++k) {
    if (s.counts[k] > 0.0) {
      s.mean[k] = sum[k] / s.counts[k];
      s.scatter[k] = sq[k] - s.counts[k] * s.mean[k] * s.mean[k].transpose();
    }
  }
  return s;
}

struct CompCache {
  Eigen::MatrixXd prec;
  Eigen::VectorXd mu;
  double logw;  // log pi_k - 0.5 p log 2pi - 0.5 log|Sigma_k|
};

std::vector<CompCache> component_cache(const FiniteMixtureState& st) {
  const int K = static_cast<int>(st.pi.size());
  const int p = static_cast<int>(st.mu[0].size());
  std::vector<CompCache> cc(K);
  for (int k = 0; k < K; ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(st.sigma[k]);
    if (llt.info() != Eigen::Success)
      throw DegenerateLikelihood("finite mixture: component covariance not PD");
    double logdet = 0.0;
    for (int i = 0; i < p; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    cc[k].prec = llt.solve(Eigen::MatrixXd::Identity(p, p));
    cc[k].mu = st.mu[k];
    cc[k].logw =
        (st.pi[k] > 0.0 ? std::log(st.pi[k]) : -kInf) - 0.5 * p * kLog2Pi - 0.5 * logdet;
  }
  return cc;
}

double quad_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& mu, const double* x, int p) {
  double q = 0.0;
  for (int a = 0; a < p; ++a) {
    double da = x[a] - mu(a);
    double acc = 0.0;
    for (int b = 0; b < p; ++b) acc += A(a, b) * (x[b] - mu(b));
    q += da * acc;
  }
  return q;
}

}  // namespace

std::vector<double> alloc_probs(const FiniteMixtureState& st, const Eigen::VectorXd& x) {
  const int K = static_cast<int>(st.pi.size());
  const int p = static_cast<int>(x.size());
  auto cc = component_cache(st);
  std::vector<double> lw(K);
  double m = -kInf;
  for (int k = 0; k < K; ++k) {
    lw[k] = cc[k].logw - 0.5 * quad_form(cc[k].prec, cc[k].mu, x.data(), p);
    m = std::max(m, lw[k]);
  }
  if (std::isinf(m) || std::isnan(m))
    throw DegenerateLikelihood("alloc_probs: zero likelihood under every component");
  double s = 0.0;
  std::vector<double> pr(K);
  for (int k = 0; k < K; ++k) {
    pr[k] = std::exp(lw[k] - m);
    s += pr[k];
  }
  for (double& v : pr) v /= s;
  return pr;
}

void update_alloc(FiniteMixtureState& st, const Eigen::MatrixXd& data, Rng& rng) {
  const int K = static_cast<int>(st.pi.size());
  const int p = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  auto cc = component_cache(st);
  std::vector<double> lw(static_cast<std::size_t>(K));
  for (int i = 0; i < n; ++i) {
    const double* x = data.col(i).data();
    double m = -kInf;
    for (int k = 0; k < K; ++k) {
      lw[k] = cc[k].logw - 0.5 * quad_form(cc[k].prec, cc[k].mu, x, p);
      if (lw[k] > m) m = lw[k];
    }
    if (std::isinf(m) || std::isnan(m))
      throw DegenerateLikelihood("update_alloc: zero likelihood under every component");
    double s = 0.0;
    for (int k = 0; k < K; ++k) {
      lw[k] = std::exp(lw[k] - m);
      s += lw[k];
    }
    double u = rng.uniform() * s;
    double c = 0.0;
    int zi = K - 1;
    for (int k = 0; k < K; ++k) {
      c += lw[k];
      if (u < c) {
        zi = k;
        break;
      }
    }
    st.z[static_cast<std::size_t>(i)] = zi;
  }
}

InvWishartParams covariance_conditional(const Eigen::MatrixXd& data, const std::vector<int>& z,
                                        int k, const FiniteMixturePrior& prior, int J) {
  const int p = static_cast<int>(data.rows());
  const double Jd = static_cast<double>(J);
  SuffStats s = suff_stats(data, z, prior.K());
  double nk = s.counts[k];
  double kappa = 1.0 / (prior.l * Jd);  // (lJ)^-1
  InvWishartParams out;
  out.dof = nk + (prior.nu + 1.0) / Jd - (p + 1.0) * (Jd - 1.0) / Jd;
  out.scale = s.scatter[k] + prior.S / Jd;
  if (nk > 0.0)
    out.scale += (kappa * nk / (kappa + nk)) * s.mean[k] * s.mean[k].transpose();
  return out;
}

MvNormalParams means_conditional(const Eigen::MatrixXd& data, const std::vector<int>& z, int k,
                                 const Eigen::MatrixXd& sigma_k, const FiniteMixturePrior& prior,
                                 int J) {
  const int p = static_cast<int>(data.rows());
  SuffStats s = suff_stats(data, z, prior.K());
  double nk = s.counts[k];
  double kappa = 1.0 / (prior.l * static_cast<double>(J));
  double denom = kappa + nk;
  MvNormalParams out;
  out.mean = nk > 0.0 ? Eigen::VectorXd(nk / denom * s.mean[k]) : Eigen::VectorXd::Zero(p);
  out.cov = sigma_k / denom;
  return out;
}

DirichletParams weights_conditional(const std::vector<int>& z, const FiniteMixturePrior& prior,
                                    int J, int K) {
  DirichletParams out;
  out.alpha.assign(static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) out.alpha[k] = prior.alpha[k] / static_cast<double>(J);
  for (int zi : z) out.alpha[static_cast<std::size_t>(zi)] += 1.0;
  return out;
}

int update_covariance(FiniteMixtureState& st, const Eigen::MatrixXd& data,
                      const FiniteMixturePrior& prior, int J, Rng& rng,
                      const FiniteOptions& opt) {
  const int K = static_cast<int>(st.pi.size());
  const int p = static_cast<int>(data.rows());
  const double Jd = static_cast<double>(J);
  SuffStats s = suff_stats(data, st.z, K);
  double kappa = 1.0 / (prior.l * Jd);
  int clamps = 0;
  for (int k = 0; k < K; ++k) {
    InvWishartParams cond;
    cond.dof = s.counts[k] + (prior.nu + 1.0) / Jd - (p + 1.0) * (Jd - 1.0) / Jd;
    cond.scale = s.scatter[k] + prior.S / Jd;
    if (s.counts[k] > 0.0)
      cond.scale +=
          (kappa * s.counts[k] / (kappa + s.counts[k])) * s.mean[k] * s.mean[k].transpose();
    if (!cond.proper()) {
      if (!opt.clamp_improper_dof)
        throw ImproperConditional("update_covariance: conditional dof <= p + 1");
      cond.dof = p + 1.0 + opt.clamp_eps;
      ++clamps;
    }
    st.sigma[static_cast<std::size_t>(k)] = sample_invwishart(cond, rng);
  }
  return clamps;
}

void update_means(FiniteMixtureState& st, const Eigen::MatrixXd& data,
                  const FiniteMixturePrior& prior, int J, Rng& rng) {
  const int K = static_cast<int>(st.pi.size());
  const int p = static_cast<int>(data.rows());
  SuffStats s = suff_stats(data, st.z, K);
  double kappa = 1.0 / (prior.l * static_cast<double>(J));
  for (int k = 0; k < K; ++k) {
    double denom = kappa + s.counts[k];
    MvNormalParams cond;
    cond.mean = s.counts[k] > 0.0 ? Eigen::VectorXd(s.counts[k] / denom * s.mean[k])
                                  : Eigen::VectorXd::Zero(p);
    cond.cov = st.sigma[static_cast<std::size_t>(k)] / denom;
    st.mu[static_cast<std::size_t>(k)] = sample_mvnormal(cond, rng);
  }
}

void update_weights(FiniteMixtureState& st, const FiniteMixturePrior& prior, int J, Rng& rng) {
  const int K = static_cast<int>(st.pi.size());
  DirichletParams cond = weights_conditional(st.z, prior, J, K);
  st.pi = sample_dirichlet(cond, rng);
}

DensityGrid mixture_density(const FiniteMixtureState& st, const DensityGrid& grid) {
  const int K = static_cast<int>(st.pi.size());
  const int p = static_cast<int>(st.mu[0].size());
  auto cc = component_cache(st);
  DensityGrid out = grid;
  std::fill(out.v.begin(), out.v.end(), 0.0);
  if (!grid.two_d()) {
    if (p != 1) throw GridMismatch("mixture_density: 1-D grid for multivariate state");
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
      double x = grid.xs[i];
      double f = 0.0;
      for (int k = 0; k < K; ++k)
        f += std::exp(cc[k].logw - 0.5 * quad_form(cc[k].prec, cc[k].mu, &x, 1));
      out.v[i] = f;
    }
    return out;
  }
  if (p != 2) throw GridMismatch("mixture_density: 2-D grid needs bivariate state");
  const std::size_t ny = grid.ys.size();
  double xy[2];
  for (std::size_t i = 0; i < grid.xs.size(); ++i) {
    xy[0] = grid.xs[i];
    for (std::size_t j = 0; j < ny; ++j) {
      xy[1] = grid.ys[j];
      double f = 0.0;
      for (int k = 0; k < K; ++k)
        f += std::exp(cc[k].logw - 0.5 * quad_form(cc[k].prec, cc[k].mu, xy, 2));
      out.v[i * ny + j] = f;
    }
  }
  return out;
}

std::vector<double> relabeled_params(const FiniteMixtureState& st) {
  const int K = static_cast<int>(st.pi.size());
  const int p = static_cast<int>(st.mu[0].size());
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return st.mu[a](0) < st.mu[b](0); });
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(K * (1 + p + p * (p + 1) / 2)));
  for (int k : order) out.push_back(st.pi[static_cast<std::size_t>(k)]);
  for (int k : order)
    for (int a = 0; a < p; ++a) out.push_back(st.mu[static_cast<std::size_t>(k)](a));
  for (int k : order)
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) out.push_back(st.sigma[static_cast<std::size_t>(k)](a, b));
  return out;
}

std::vector<std::string> finite_param_names(int K, int p) {
  std::vector<std::string> names;
  for (int k = 1; k <= K; ++k) names.push_back("pi." + std::to_string(k));
  for (int k = 1; k <= K; ++k)
    for (int a = 1; a <= p; ++a)
      names.push_back("mu." + std::to_string(k) + "." + std::to_string(a));
  for (int k = 1; k <= K; ++k)
    for (int a = 1; a <= p; ++a)
      for (int b = a; b <= p; ++b)
        names.push_back("sigma." + std::to_string(k) + "." + std::to_string(a) +
                        std::to_string(b));
  return names;
}

ChainDraws run_finite_chain(const Eigen::MatrixXd& data, const FiniteMixturePrior& prior, int J,
                            const GibbsConfig& cfg, const DensityGrid& grid, std::uint64_t seed) {
  const int K = prior.K();
  const int p = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  if (n < 1) throw DegenerateLikelihood("run_finite_chain: empty shard");
  Rng rng(seed);

  FiniteMixtureState st;
  st.pi.assign(static_cast<std::size_t>(K), 1.0 / K);
  st.z.assign(static_cast<std::size_t>(n), 0);  // overwritten by the first alloc sweep
  Eigen::MatrixXd sigma0 = prior.S;
  if (n >= 2) {
    Eigen::VectorXd xbar = data.rowwise().mean();
    Eigen::MatrixXd centered = data.colwise() - xbar;
    sigma0 = centered * centered.transpose() / static_cast<double>(n - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma0);
    if (llt.info() != Eigen::Success) sigma0 = prior.S;
  }
  st.sigma.assign(static_cast<std::size_t>(K), sigma0);
  /* Atoms start at data points spread k-means++ style across the cloud, so
     every component can claim observations at the first sweep. Prior-scale
     starts put atoms far outside the data and collapse the chain into a
     single occupied component. */
  st.mu.resize(static_cast<std::size_t>(K));
  std::vector<double> d2(static_cast<std::size_t>(n), kInf);
  for (int k = 0; k < K; ++k) {
    int pick = std::min(n - 1, static_cast<int>(rng.uniform() * n));
    if (k > 0) {
      double total = 0.0;
      for (double v : d2) total += v;
      if (total > 0.0) {
        double u = rng.uniform() * total, c = 0.0;
        pick = n - 1;
        for (int i = 0; i < n; ++i) {
          c += d2[static_cast<std::size_t>(i)];
          if (u < c) {
            pick = i;
            break;
          }
        }
      }
    }
    st.mu[static_cast<std::size_t>(k)] = data.col(pick);
    for (int i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] = std::min(
          d2[static_cast<std::size_t>(i)],
          (data.col(i) - st.mu[static_cast<std::size_t>(k)]).squaredNorm());
  }

  FiniteOptions opt;
  opt.clamp_improper_dof = true;
  ChainDraws out;
  out.seed = seed;
  out.param_names = finite_param_names(K, p);
  out.densities.reserve(static_cast<std::size_t>(cfg.retained()));
  out.params.reserve(static_cast<std::size_t>(cfg.retained()));
  for (int it = 1; it <= cfg.iters; ++it) {
    update_alloc(st, data, rng);
    out.diag.dof_clamps += update_covariance(st, data, prior, J, rng, opt);
    update_means(st, data, prior, J, rng);
    update_weights(st, prior, J, rng);
    if (it > cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
      out.densities.push_back(mixture_density(st, grid));
      out.params.push_back(relabeled_params(st));
    }
  }
  return out;
}

}  // namespace dcd
