#include "dcd/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dcd/rng.hpp"
#include "dcd/stats.hpp"

namespace dcd {

Sim1Truth sim1_truth() {
  Sim1Truth t;
  t.pi = {0.3, 0.7};
  Eigen::VectorXd m1(2), m2(2);
  m1 << 1.0, 2.0;
  m2 << 7.0, 8.0;
  t.mu = {m1, m2};
  t.Sigma.resize(2, 2);
  t.Sigma << 1.0, 0.5, 0.5, 2.0;
  return t;
}

FiniteMixturePrior sim1_prior() {
  FiniteMixturePrior p;
  p.alpha = {0.5, 0.5};
  p.l = 100.0;
  p.nu = 2.0;
  p.S = 4.0 * Eigen::MatrixXd::Identity(2, 2);
  return p;
}

Eigen::MatrixXd gen_sim1(std::size_t n, std::uint64_t seed) {
  Sim1Truth t = sim1_truth();
  Rng rng(seed);
  Eigen::LLT<Eigen::MatrixXd> llt(t.Sigma);
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd out(2, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    int k = rng.uniform() < t.pi[0] ? 0 : 1;
    Eigen::VectorXd z(2);
    z << rng.normal(), rng.normal();
    out.col(static_cast<Eigen::Index>(i)) = t.mu[static_cast<std::size_t>(k)] + L * z;
  }
  return out;
}

std::vector<double> sim1_truth_params() {
  Sim1Truth t = sim1_truth();
  // layout of relabeled_params: weights, means, then vech(Sigma) per component
  return {t.pi[0],        t.pi[1],        t.mu[0](0),     t.mu[0](1),    t.mu[1](0),
          t.mu[1](1),     t.Sigma(0, 0),  t.Sigma(0, 1),  t.Sigma(1, 1), t.Sigma(0, 0),
          t.Sigma(0, 1),  t.Sigma(1, 1)};
}

DensityGrid sim1_truth_density(const DensityGrid& grid) {
  if (!grid.two_d()) throw GridMismatch("sim1_truth_density needs a 2-D grid");
  Sim1Truth t = sim1_truth();
  DensityGrid out = grid;
  MvNormalParams c1{t.mu[0], t.Sigma}, c2{t.mu[1], t.Sigma};
  Eigen::VectorXd x(2);
  const std::size_t ny = grid.ys.size();
  for (std::size_t ix = 0; ix < grid.xs.size(); ++ix)
    for (std::size_t iy = 0; iy < ny; ++iy) {
      x << grid.xs[ix], grid.ys[iy];
      out.v[ix * ny + iy] =
          t.pi[0] * std::exp(log_density(c1, x)) + t.pi[1] * std::exp(log_density(c2, x));
    }
  return out;
}

std::vector<NoisyObservation> Sim2Data::observations() const {
  std::vector<NoisyObservation> obs(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) obs[i] = {w[i], sigma[i]};
  return obs;
}

Sim2Data gen_sim2(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Sim2Data d;
  d.w.resize(n);
  d.sigma.resize(n);
  d.x_true.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x;
    if (rng.uniform() < 0.8) {
      x = 0.2 * rng.normal();
    } else {
      x = sample_student_t(5.0, rng);
    }
    d.x_true[i] = x;
    d.sigma[i] = std::max(0.75 + x / 4.0, 1e-6);
    d.w[i] = x + d.sigma[i] * rng.normal();
  }
  return d;
}

double sim2_truth_pdf(double x) {
  double norm_part = std::exp(log_density_normal(x, 0.0, 0.2));
  double t_part = std::exp(log_density_student_t(5.0, x));
  return 0.8 * norm_part + 0.2 * t_part;
}

DensityGrid sim2_truth_density(const DensityGrid& grid) {
  if (grid.two_d()) throw GridMismatch("sim2_truth_density needs a 1-D grid");
  DensityGrid out = grid;
  for (std::size_t i = 0; i < grid.xs.size(); ++i) out.v[i] = sim2_truth_pdf(grid.xs[i]);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string lower_trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out = s.substr(b, e - b);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double parse_double(const std::string& tok, std::size_t line, std::size_t col) {
  const std::string t = lower_trim(tok);
  if (t.empty()) throw ParseError("empty numeric field", line, col);
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0' || !std::isfinite(v))
    throw ParseError("cannot parse '" + tok + "' as a finite number", line, col);
  return v;
}

}  // namespace

std::vector<NoisyObservation> ingest_gwas(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile("empty file: " + path);

  std::size_t w_col = static_cast<std::size_t>(-1);
  std::size_t s_col = static_cast<std::size_t>(-1);
  std::vector<std::string> header = split_csv_line(line);
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string h = lower_trim(header[c]);
    if (h == "w") w_col = c;
    if (h == "sigma") s_col = c;
  }
  if (w_col == static_cast<std::size_t>(-1) || s_col == static_cast<std::size_t>(-1))
    throw ParseError("header must contain columns 'w' and 'sigma'", 1);

  std::vector<NoisyObservation> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> toks = split_csv_line(line);
    if (toks.size() <= std::max(w_col, s_col))
      throw ParseError("row has " + std::to_string(toks.size()) + " fields, need at least " +
                           std::to_string(std::max(w_col, s_col) + 1),
                       lineno);
    NoisyObservation obs;
    obs.w = parse_double(toks[w_col], lineno, w_col + 1);
    obs.sigma = parse_double(toks[s_col], lineno, s_col + 1);
    if (!(obs.sigma > 0.0))
      throw ParseError("sigma must be positive, got " + toks[s_col], lineno, s_col + 1);
    out.push_back(obs);
  }
  if (out.empty()) throw EmptyFile("no data rows in " + path);
  return out;
}

}  // namespace dcd
