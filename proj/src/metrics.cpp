#include "dcd/metrics.hpp"

#include <cmath>

#include "dcd/common.hpp"

namespace dcd {

std::string RegionSpec::name() const {
  switch (kind) {
    case kAll: return "all";
    case kAbsAbove: return "abs>" + std::to_string(cutoff);
    case kAbsBelow: return "abs<" + std::to_string(cutoff);
  }
  return "?";
}

double hellinger(const DensityGrid& a, const DensityGrid& b) {
  require_same_axes(a, b);
  std::vector<double> w = a.quad_weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double d = std::sqrt(std::max(a.v[i], 0.0)) - std::sqrt(std::max(b.v[i], 0.0));
    acc += w[i] * d * d;
  }
  return std::sqrt(std::max(acc, 0.0));
}

double w2_to_point(const std::vector<DensityGrid>& draws, const DensityGrid& f0) {
  if (draws.empty()) throw GridMismatch("w2_to_point: no draws");
  double acc = 0.0;
  for (const auto& g : draws) {
    double h = hellinger(g, f0);
    acc += h * h;
  }
  return std::sqrt(acc / static_cast<double>(draws.size()));
}

double iad(const DensityGrid& a, const DensityGrid& b, const RegionSpec& region) {
  require_same_axes(a, b);
  std::vector<double> w = a.quad_weights();
  const std::size_t ny = a.two_d() ? a.ys.size() : 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double x = a.xs[i / ny];
    bool in = true;
    if (region.kind == RegionSpec::kAbsAbove) in = std::abs(x) > region.cutoff;
    if (region.kind == RegionSpec::kAbsBelow) in = std::abs(x) < region.cutoff;
    if (in) acc += w[i] * std::abs(a.v[i] - b.v[i]);
  }
  return acc;
}

ParamTable param_table(const std::vector<std::vector<double>>& replications,
                       const std::vector<double>& truth,
                       const std::vector<std::string>& names) {
  if (replications.empty()) throw MissingParams("param_table: no replications");
  const std::size_t P = truth.size();
  for (const auto& row : replications)
    if (row.size() != P)
      throw MissingParams("param_table: replication length does not match the truth vector");
  if (!names.empty() && names.size() != P)
    throw MissingParams("param_table: name list does not match the truth vector");

  const auto R = static_cast<double>(replications.size());
  ParamTable t;
  t.names = names;
  if (t.names.empty())
    for (std::size_t i = 1; i <= P; ++i) t.names.push_back("param." + std::to_string(i));
  t.bias.resize(P);
  t.sd.resize(P);
  t.se.resize(P);
  for (std::size_t i = 0; i < P; ++i) {
    double m = 0.0;
    for (const auto& row : replications) m += row[i];
    m /= R;
    double ss = 0.0;
    for (const auto& row : replications) ss += (row[i] - m) * (row[i] - m);
    double sd = replications.size() > 1 ? std::sqrt(ss / (R - 1.0)) : 0.0;
    t.bias[i] = m - truth[i];
    t.sd[i] = sd;
    t.se[i] = sd / std::sqrt(R);
  }
  return t;
}

}  // namespace dcd
