#pragma once

#include <string>
#include <vector>

#include "dcd/grid.hpp"

namespace dcd {

/* Region filter for integrated absolute distance. abs_above / abs_below select
   grid points with |x| above / below the cutoff (first axis). */
struct RegionSpec {
  enum Kind { kAll, kAbsAbove, kAbsBelow } kind = kAll;
  double cutoff = 0.0;

  static RegionSpec all() { return {kAll, 0.0}; }
  static RegionSpec abs_above(double c) { return {kAbsAbove, c}; }
  static RegionSpec abs_below(double c) { return {kAbsBelow, c}; }
  [[nodiscard]] std::string name() const;
};

/// Hellinger distance {integral (sqrt p - sqrt q)^2}^(1/2); bounded by sqrt(2).
double hellinger(const DensityGrid& a, const DensityGrid& b);

/// Wasserstein-2 distance in Hellinger geometry from a draw cloud to the point
/// mass at f0: sqrt(mean_i h^2(draw_i, f0)).
double w2_to_point(const std::vector<DensityGrid>& draws, const DensityGrid& f0);

double iad(const DensityGrid& a, const DensityGrid& b, const RegionSpec& region);

struct MetricRecord {
  std::string metric;
  std::string region;
  double value = 0.0;
  std::size_t grid_points = 0;
};

struct ParamTable {
  std::vector<std::string> names;
  std::vector<double> bias;  // mean(estimate) - truth
  std::vector<double> sd;    // sample sd across replications
  std::vector<double> se;    // sd / sqrt(replications)
};

/// Rows of `replications` are per-replication combined estimates.
ParamTable param_table(const std::vector<std::vector<double>>& replications,
                       const std::vector<double>& truth,
                       const std::vector<std::string>& names = {});

}  // namespace dcd
