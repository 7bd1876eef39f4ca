#include <cmath>
#include <vector>

#include "dcd/engine.hpp"
#include "dcd/metrics.hpp"
#include "dcd/stats.hpp"
#include "doctest.h"

using namespace dcd;

namespace {

DensityGrid normal_on(const DensityGrid& proto, double mean, double sd) {
  DensityGrid g = proto;
  for (std::size_t i = 0; i < g.xs.size(); ++i)
    g.v[i] = std::exp(log_density_normal(g.xs[i], mean, sd));
  return g;
}

/// Random normalized density: mixture of 1-3 normal bumps on the grid.
DensityGrid random_density(const DensityGrid& proto, Rng& rng) {
  DensityGrid g = proto;
  std::fill(g.v.begin(), g.v.end(), 0.0);
  const int nb = 1 + static_cast<int>(rng.uniform() * 3.0);
  for (int b = 0; b < nb; ++b) {
    double m = rng.uniform(-4.0, 4.0);
    double s = rng.uniform(0.3, 1.5);
    double w = rng.uniform(0.2, 1.0);
    for (std::size_t i = 0; i < g.xs.size(); ++i)
      g.v[i] += w * std::exp(log_density_normal(g.xs[i], m, s));
  }
  g.normalize();
  return g;
}

}  // namespace

TEST_CASE("grid construction and quadrature") {
  auto g = make_grid(-2.0, 3.0, 501);
  CHECK(g.xs.size() == 501);
  CHECK(g.xs.front() == -2.0);
  CHECK(g.xs.back() == 3.0);
  double wsum = 0.0;
  for (double w : g.quad_weights()) wsum += w;
  CHECK(wsum == doctest::Approx(5.0).epsilon(1e-12));

  std::fill(g.v.begin(), g.v.end(), 2.0);
  CHECK(g.integral() == doctest::Approx(10.0).epsilon(1e-12));
  g.normalize();
  CHECK(g.integral() == doctest::Approx(1.0).epsilon(1e-14));

  auto g2 = make_grid2(0.0, 1.0, 11, 0.0, 2.0, 21);
  CHECK(g2.two_d());
  CHECK(g2.size() == 11 * 21);
  std::fill(g2.v.begin(), g2.v.end(), 0.5);
  CHECK(g2.integral() == doctest::Approx(1.0).epsilon(1e-12));

  DensityGrid zero = make_grid(0.0, 1.0, 11);
  CHECK_THROWS_AS(zero.normalize(), GridMismatch);
  CHECK_THROWS_AS((void)make_grid(1.0, 0.0, 11), GridMismatch);
}

TEST_CASE("median and robust sd") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(robust_sd({1.0, 2.0, 3.0, 4.0, 5.0}) == doctest::Approx(1.4826).epsilon(1e-12));
  // Constant-heavy data degenerates the MAD; the sd fallback takes over.
  CHECK(robust_sd({1.0, 1.0, 1.0, 1.0, 10.0}) > 0.0);
}

TEST_CASE("Hellinger distance: pinned values and axioms") {
  auto proto = make_grid(-9.0, 10.0, 2001);
  auto f = normal_on(proto, 0.0, 1.0);
  auto g = normal_on(proto, 1.0, 1.0);

  CHECK(hellinger(f, f) == 0.0);
  CHECK(hellinger(f, g) == hellinger(g, f));
  // Closed form for unit-variance normals: sqrt(2 (1 - exp(-1/8))).
  const double cf = std::sqrt(2.0 * (1.0 - std::exp(-1.0 / 8.0)));
  CHECK(std::abs(hellinger(f, g) - cf) <= 1e-3);

  // Disjoint supports reach the sqrt(2) bound.
  DensityGrid a = proto, b = proto;
  for (std::size_t i = 0; i < proto.xs.size(); ++i) {
    a.v[i] = proto.xs[i] < -5.0 ? 1.0 : 0.0;
    b.v[i] = proto.xs[i] > 5.0 ? 1.0 : 0.0;
  }
  a.normalize();
  b.normalize();
  CHECK(std::abs(hellinger(a, b) - std::sqrt(2.0)) <= 1e-6);

  auto other = make_grid(-9.0, 10.0, 2002);
  CHECK_THROWS_AS((void)hellinger(f, other), GridMismatch);
}

TEST_CASE("Hellinger is stable under grid refinement") {
  auto c1 = make_grid(-9.0, 10.0, 1001);
  auto c2 = make_grid(-9.0, 10.0, 2001);
  double h1 = hellinger(normal_on(c1, 0.0, 1.0), normal_on(c1, 1.0, 1.3));
  double h2 = hellinger(normal_on(c2, 0.0, 1.0), normal_on(c2, 1.0, 1.3));
  CHECK(std::abs(h1 - h2) < 1e-3);
}

TEST_CASE("Wasserstein-to-point over draw clouds") {
  auto proto = make_grid(-9.0, 10.0, 1001);
  auto f0 = normal_on(proto, 0.0, 1.0);
  auto f1 = normal_on(proto, 1.0, 1.0);

  CHECK(w2_to_point({f0, f0, f0}, f0) == 0.0);
  CHECK(w2_to_point({f1}, f0) == doctest::Approx(hellinger(f1, f0)).epsilon(1e-14));

  // Two-draw cloud: root mean of squared distances.
  double h1 = hellinger(f1, f0);
  CHECK(w2_to_point({f0, f1}, f0) ==
        doctest::Approx(std::sqrt(0.5 * h1 * h1)).epsilon(1e-12));
  // Never exceeds the farthest draw.
  auto f2 = normal_on(proto, 3.0, 0.7);
  double hmax = std::max(hellinger(f1, f0), hellinger(f2, f0));
  CHECK(w2_to_point({f1, f2}, f0) <= hmax + 1e-14);
}

TEST_CASE("integrated absolute difference with regions") {
  // Grid aligned so 0, 1, 2 are grid points; steps approximate U(0,1) vs U(0,2).
  auto proto = make_grid(-0.5, 2.5, 6001);
  DensityGrid f = proto, g = proto;
  for (std::size_t i = 0; i < proto.xs.size(); ++i) {
    double x = proto.xs[i];
    f.v[i] = (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
    g.v[i] = (x >= 0.0 && x <= 2.0) ? 0.5 : 0.0;
  }
  CHECK(iad(f, f, RegionSpec::all()) == 0.0);
  CHECK(std::abs(iad(f, g, RegionSpec::all()) - 1.0) <= 1e-3);

  // Region past the grid extent selects nothing.
  CHECK(iad(f, g, RegionSpec::abs_above(100.0)) == 0.0);

  // Complementary regions partition the quadrature sum exactly
  // (cutoff chosen strictly between grid points).
  double cutoff = 0.77713;
  double above = iad(f, g, RegionSpec::abs_above(cutoff));
  double below = iad(f, g, RegionSpec::abs_below(cutoff));
  CHECK(std::abs(above + below - iad(f, g, RegionSpec::all())) <= 1e-9);

  CHECK(RegionSpec::all().name() == "all");
  CHECK(RegionSpec::abs_above(0.003).name().substr(0, 4) == "abs>");
}

TEST_CASE("parameter bias/sd/se table") {
  std::vector<double> truth = {1.0, 2.0};
  SUBCASE("exact replications give zero bias and spread") {
    auto t = param_table({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}, truth);
    CHECK(t.bias[0] == 0.0);
    CHECK(t.sd[1] == 0.0);
    CHECK(t.se[1] == 0.0);
    CHECK(t.names[0] == "param.1");
  }
  SUBCASE("two-point spread: bias 0, sd 0.01 sqrt(2), se = sd/sqrt(2)") {
    auto t = param_table({{1.01, 2.01}, {0.99, 1.99}}, truth);
    CHECK(t.bias[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t.sd[0] == doctest::Approx(0.0141421356).epsilon(1e-6));
    CHECK(t.se[0] == doctest::Approx(t.sd[0] / std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("length mismatches throw") {
    CHECK_THROWS_AS((void)param_table({{1.0}}, truth), MissingParams);
    CHECK_THROWS_AS((void)param_table({}, truth), MissingParams);
    CHECK_THROWS_AS((void)param_table({{1.0, 2.0}}, truth, {"onlyone"}), MissingParams);
  }
}

TEST_CASE("squared Hellinger is biconvex; the unsquared distance is not") {
  auto proto = make_grid(-8.0, 8.0, 801);

  SUBCASE("random triples satisfy the squared-distance inequality") {
    Rng rng(555);
    for (int i = 0; i < 100; ++i) {
      auto g1 = random_density(proto, rng);
      auto g2 = random_density(proto, rng);
      auto f = random_density(proto, rng);
      double w1 = rng.uniform();
      double w2 = 1.0 - w1;
      DensityGrid mix = proto;
      for (std::size_t k = 0; k < mix.v.size(); ++k) mix.v[k] = w1 * g1.v[k] + w2 * g2.v[k];
      double h0 = hellinger(mix, f);
      double h1 = hellinger(g1, f);
      double h2 = hellinger(g2, f);
      CHECK(h0 * h0 <= w1 * h1 * h1 + w2 * h2 * h2 + 1e-9);
    }
  }

  SUBCASE("far-away mass breaks the unsquared form") {
    // Mixing eps of disjoint mass into f moves h by ~sqrt(eps), so the
    // distance itself admits no linear-in-weights bound. Only h^2 is convex.
    auto f = normal_on(proto, 0.0, 0.5);
    auto g2 = normal_on(proto, 6.0, 0.5);
    const double w2 = 0.01;
    DensityGrid mix = proto;
    for (std::size_t k = 0; k < mix.v.size(); ++k) mix.v[k] = (1.0 - w2) * f.v[k] + w2 * g2.v[k];
    double lhs = hellinger(mix, f);
    double rhs = (1.0 - w2) * hellinger(f, f) + w2 * hellinger(g2, f);
    CHECK(lhs > rhs + 1e-3);
    double h2 = hellinger(g2, f);
    CHECK(lhs * lhs <= w2 * h2 * h2 + 1e-9);
  }
}

TEST_CASE("Lemma 2: combined draw cloud is no farther than the shard average") {
  auto proto = make_grid(-8.0, 8.0, 401);
  Rng rng(777);
  auto truth = normal_on(proto, 0.0, 1.0);
  const int J = 4, R = 25;
  std::vector<ChainDraws> shards(J);
  for (int j = 0; j < J; ++j)
    for (int r = 0; r < R; ++r) shards[j].densities.push_back(random_density(proto, rng));

  for (Pairing pairing : {Pairing::kAligned, Pairing::kShuffled}) {
    Rng prng(900 + static_cast<int>(pairing));
    auto cloud = combine_draw_level(shards, pairing, prng);
    double lhs = w2_to_point(cloud, truth);
    double rhs = 0.0;
    for (const auto& s : shards) rhs += w2_to_point(s.densities, truth);
    rhs /= J;
    CHECK(lhs <= rhs + 1e-9);
  }
}
