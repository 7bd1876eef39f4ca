#include "dcd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dcd {

namespace {

std::vector<double> axis_weights(const std::vector<double>& a) {
  const std::size_t n = a.size();
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = 1.0;  // degenerate axis: treat as unit weight
    return w;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double h = 0.5 * (a[i + 1] - a[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> a(static_cast<std::size_t>(n));
  if (n == 1) {
    a[0] = lo;
    return a;
  }
  double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = lo + step * i;
  a.back() = hi;
  return a;
}

}  // namespace

std::vector<double> DensityGrid::quad_weights() const {
  std::vector<double> wx = axis_weights(xs);
  if (!two_d()) return wx;
  std::vector<double> wy = axis_weights(ys);
  std::vector<double> w(xs.size() * ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) w[i * ys.size() + j] = wx[i] * wy[j];
  return w;
}

double DensityGrid::integral() const {
  std::vector<double> w = quad_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
  return s;
}

void DensityGrid::normalize() {
  double z = integral();
  if (!(z > 0.0)) throw GridMismatch("normalize: integral not positive");
  for (double& x : v) x /= z;
}

bool same_axes(const DensityGrid& a, const DensityGrid& b) noexcept {
  return a.xs == b.xs && a.ys == b.ys;
}

void require_same_axes(const DensityGrid& a, const DensityGrid& b) {
  if (!same_axes(a, b)) throw GridMismatch("density grids have different axes");
}

DensityGrid make_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw GridMismatch("make_grid: need n >= 2 and hi > lo");
  DensityGrid g;
  g.xs = linspace(lo, hi, n);
  g.v.assign(g.xs.size(), 0.0);
  return g;
}

DensityGrid make_grid2(double xlo, double xhi, int nx, double ylo, double yhi, int ny) {
  if (nx < 2 || ny < 2 || !(xhi > xlo) || !(yhi > ylo))
    throw GridMismatch("make_grid2: need n >= 2 per axis and hi > lo");
  DensityGrid g;
  g.xs = linspace(xlo, xhi, nx);
  g.ys = linspace(ylo, yhi, ny);
  g.v.assign(g.xs.size() * g.ys.size(), 0.0);
  return g;
}

double median(std::vector<double> x) {
  if (x.empty()) return 0.0;
  std::sort(x.begin(), x.end());
  std::size_t n = x.size();
  return (n % 2 == 1) ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double robust_sd(std::vector<double> x) {
  if (x.size() < 2) return 0.0;
  double med = median(x);
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - med);
  double mad = median(dev);
  if (mad > 0.0) return 1.4826 * mad;
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

DensityGrid default_grid_1d(const std::vector<double>& data, int n) {
  if (data.empty()) throw GridMismatch("default_grid_1d: empty data");
  auto [mn, mx] = std::minmax_element(data.begin(), data.end());
  double pad = 3.0 * robust_sd(data);
  if (!(pad > 0.0)) pad = 1.0;
  return make_grid(*mn - pad, *mx + pad, n);
}

}  // namespace dcd
