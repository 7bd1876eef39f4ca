#pragma once

#include <cstddef>
#include <vector>

#include "dcd/common.hpp"

namespace dcd {

/* Density values tabulated on a 1-D grid or a 2-D rectangular lattice.
   2-D values are stored x-major: v[ix * ys.size() + iy]. Integrals use
   tensor-product trapezoid weights; axes may be non-uniform. */
struct DensityGrid {
  std::vector<double> xs;
  std::vector<double> ys;  // empty for 1-D
  std::vector<double> v;

  [[nodiscard]] bool two_d() const noexcept { return !ys.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return v.size(); }
  [[nodiscard]] std::vector<double> quad_weights() const;
  [[nodiscard]] double integral() const;
  void normalize();  // throws GridMismatch if the integral is not positive
};

[[nodiscard]] bool same_axes(const DensityGrid& a, const DensityGrid& b) noexcept;
void require_same_axes(const DensityGrid& a, const DensityGrid& b);

DensityGrid make_grid(double lo, double hi, int n);
DensityGrid make_grid2(double xlo, double xhi, int nx, double ylo, double yhi, int ny);

/// 1.4826 * median absolute deviation; falls back to the sd when degenerate.
double robust_sd(std::vector<double> x);
double median(std::vector<double> x);

/// Default 1-D estimation grid: data min/max widened by 3 robust sd, n points.
DensityGrid default_grid_1d(const std::vector<double>& data, int n = 1001);

}  // namespace dcd
