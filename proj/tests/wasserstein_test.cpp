#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "watch/error.hpp"
#include "watch/kernels.hpp"
#include "watch/wasserstein.hpp"

namespace watch {
namespace {

std::vector<double> uniform_list(std::size_t n, std::mt19937_64& rng, double lo = -10,
                                 double hi = 10) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

PointSet random_set(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  return PointSet(n, d, uniform_list(n * d, rng, -3, 3));
}

TEST(Exact1d, WorkedExamples) {
  EXPECT_DOUBLE_EQ(exact_1d_wasserstein(std::vector{0.0, 0.0}, std::vector{1.0, 1.0}, 1), 1.0);
  EXPECT_DOUBLE_EQ(exact_1d_wasserstein(std::vector{1.0, 2.0, 3.0}, std::vector{1.0, 2.0, 3.0}, 2), 0.0);
  EXPECT_DOUBLE_EQ(exact_1d_wasserstein(std::vector{0.0, 1.0}, std::vector{0.0, 3.0}, 1), 1.0);
  EXPECT_DOUBLE_EQ(oracle::permutation_wasserstein_1d({0, 1}, {0, 3}, 1), 1.0);
  // Unequal sizes: half the mass moves 0, half moves 2.
  EXPECT_DOUBLE_EQ(exact_1d_wasserstein(std::vector{0.0}, std::vector{0.0, 2.0}, 1), 1.0);
}

TEST(Exact1d, UnequalSizesMatchReplicatedEqualSizes) {
  // An n-point and an m-point empirical law are the same as their
  // m-fold and n-fold replications, which the permutation oracle handles.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto xs = uniform_list(2, rng);
    const auto ys = uniform_list(3, rng);
    std::vector<double> xr, yr;
    for (int r = 0; r < 3; ++r) xr.insert(xr.end(), xs.begin(), xs.end());
    for (int r = 0; r < 2; ++r) yr.insert(yr.end(), ys.begin(), ys.end());
    for (double p : {1.0, 2.0, 3.5}) {
      EXPECT_NEAR(exact_1d_wasserstein(xs, ys, p), oracle::permutation_wasserstein_1d(xr, yr, p),
                  1e-9);
    }
  }
}

TEST(Exact1d, MatchesPermutationOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto xs = uniform_list(n, rng);
    const auto ys = uniform_list(n, rng);
    const double p = trial % 2 ? 2.0 : 1.0;
    EXPECT_NEAR(exact_1d_wasserstein(xs, ys, p), oracle::permutation_wasserstein_1d(xs, ys, p),
                1e-9);
  }
}

TEST(Exact1d, Properties) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto xs = uniform_list(1 + trial % 7, rng);
    const auto ys = uniform_list(1 + trial % 5, rng);
    const auto zs = uniform_list(1 + trial % 4, rng);
    const double p = 1.0 + (trial % 3) * 0.75;
    const double w = exact_1d_wasserstein(xs, ys, p);
    EXPECT_GE(w, 0.0);
    EXPECT_EQ(w, exact_1d_wasserstein(ys, xs, p));
    EXPECT_EQ(exact_1d_wasserstein(xs, xs, p), 0.0);

    std::vector<double> xs_shift = xs, ys_shift = ys;
    for (auto& x : xs_shift) x += 4.25;
    for (auto& y : ys_shift) y += 4.25;
    EXPECT_NEAR(exact_1d_wasserstein(xs_shift, ys_shift, p), w, 1e-12 * (1 + w) + 1e-12);

    const double a = -2.5;
    std::vector<double> xs_scaled = xs, ys_scaled = ys;
    for (auto& x : xs_scaled) x *= a;
    for (auto& y : ys_scaled) y *= a;
    EXPECT_NEAR(exact_1d_wasserstein(xs_scaled, ys_scaled, p), std::abs(a) * w, 1e-9);

    EXPECT_LE(exact_1d_wasserstein(xs, zs, p),
              exact_1d_wasserstein(xs, ys, p) + exact_1d_wasserstein(ys, zs, p) + 1e-9);
  }
}

TEST(Exact1d, Errors) {
  const std::vector<double> empty;
  const std::vector<double> one{1.0};
  EXPECT_THROW(exact_1d_wasserstein(empty, one, 1), InvalidInput);
  EXPECT_THROW(exact_1d_wasserstein(one, std::vector<double>{NAN}, 1), InvalidInput);
  EXPECT_THROW(exact_1d_wasserstein(one, std::vector<double>{INFINITY}, 1), InvalidInput);
  EXPECT_THROW(exact_1d_wasserstein(one, one, 0.5), InvalidInput);
}

TEST(Sliced, IdenticalSetsAreZero) {
  std::mt19937_64 rng(4);
  const auto a = random_set(9, 5, rng);
  EXPECT_EQ(sliced_wasserstein(a, a, {}), 0.0);
}

TEST(Sliced, OneDimensionalEqualsExact) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto xs = uniform_list(1 + trial % 9, rng);
    const auto ys = uniform_list(1 + trial % 6, rng);
    const DistanceConfig cfg{1.0 + trial % 2, 1 + static_cast<std::size_t>(trial % 7),
                             static_cast<std::uint64_t>(trial)};
    EXPECT_NEAR(sliced_wasserstein(PointSet::from_scalars(xs), PointSet::from_scalars(ys), cfg),
                exact_1d_wasserstein(xs, ys, cfg.p), 1e-9);
  }
}

TEST(Sliced, SinglePointPairIsMeanProjectedGap) {
  const auto a = PointSet::from_rows({{0.0, 0.0}});
  const auto b = PointSet::from_rows({{3.0, 4.0}});
  const DistanceConfig cfg{1.0, 64, 42};
  const auto dirs = draw_directions(2, cfg);
  double expected = 0.0;
  for (std::size_t s = 0; s < cfg.n_projections; ++s) {
    EXPECT_NEAR(std::hypot(dirs[2 * s], dirs[2 * s + 1]), 1.0, 1e-15);
    expected += std::abs(3.0 * dirs[2 * s] + 4.0 * dirs[2 * s + 1]);
  }
  expected /= static_cast<double>(cfg.n_projections);
  const double got = sliced_wasserstein(a, b, cfg);
  EXPECT_NEAR(got, expected, 1e-12);
  EXPECT_LE(got, 5.0);
}

TEST(Sliced, SymmetricHomogeneousDeterministic) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_set(4 + trial % 5, 6, rng);
    const auto b = random_set(3 + trial % 4, 6, rng);
    const DistanceConfig cfg{2.0, 32, 99};
    const double w = sliced_wasserstein(a, b, cfg);
    EXPECT_NEAR(sliced_wasserstein(b, a, cfg), w, 1e-12);
    EXPECT_EQ(sliced_wasserstein(a, b, cfg), w);

    std::vector<double> as(a.values().begin(), a.values().end());
    std::vector<double> bs(b.values().begin(), b.values().end());
    for (auto& x : as) x *= 3.0;
    for (auto& x : bs) x *= 3.0;
    EXPECT_NEAR(sliced_wasserstein(PointSet(a.size(), 6, as), PointSet(b.size(), 6, bs), cfg),
                3.0 * w, 1e-9);
  }
}

TEST(Sliced, DimensionMismatch) {
  std::mt19937_64 rng(7);
  EXPECT_THROW(sliced_wasserstein(random_set(3, 2, rng), random_set(3, 3, rng), {}), InvalidInput);
  EXPECT_THROW(sliced_wasserstein(random_set(3, 2, rng), random_set(3, 2, rng), {0.5, 8, 1}),
               ConfigInvalid);
  EXPECT_THROW(sliced_wasserstein(random_set(3, 2, rng), random_set(3, 2, rng), {2.0, 0, 1}),
               ConfigInvalid);
}

TEST(Sliced, NeverExceedsExactTransport) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto a = random_set(n, 3, rng);
    const auto b = random_set(n, 3, rng);
    for (double p : {1.0, 2.0}) {
      EXPECT_LE(sliced_wasserstein(a, b, {p, 128, 42}), exact_ot_distance(a, b, p) + 1e-9);
    }
  }
}

TEST(Sliced, ProjectorPathIsBitIdentical) {
  std::mt19937_64 rng(9);
  const auto a = random_set(12, 20, rng);
  const auto b1 = random_set(5, 20, rng);
  const auto b2 = random_set(7, 20, rng);
  const DistanceConfig cfg{2.0, 16, 3};
  const SlicedProjector proj(20, cfg);
  const auto s1 = proj.project(b1);
  const auto s2 = proj.project(b2);
  const SortedSlices* parts[] = {&s1, &s2};
  const auto merged = SortedSlices::merge(parts);
  const std::vector<PointSet> sets{b1, b2};
  EXPECT_EQ(proj.distance(proj.project(a), merged),
            sliced_wasserstein(a, concatenate(sets), cfg));
}

TEST(Sliced, VariantsAgree) {
  std::mt19937_64 rng(10);
  const auto a = random_set(30, 64, rng);
  const auto b = random_set(20, 64, rng);
  const kernels::Isa before = kernels::active_isa();
  kernels::set_active_isa(kernels::Isa::scalar);
  const double ref = sliced_wasserstein(a, b, {});
  for (auto isa : {kernels::Isa::avx2, kernels::Isa::neon}) {
    if (!kernels::isa_available(isa)) continue;
    kernels::set_active_isa(isa);
    EXPECT_NEAR(sliced_wasserstein(a, b, {}), ref, 1e-12);
  }
  kernels::set_active_isa(before);
}

TEST(ExactOt, WorkedExamples) {
  const auto a = PointSet::from_rows({{0, 0}, {1, 0}});
  const auto b = PointSet::from_rows({{0, 1}, {1, 1}});
  EXPECT_DOUBLE_EQ(exact_ot_distance(a, b, 2), 1.0);
  EXPECT_EQ(exact_ot_distance(a, a, 2), 0.0);
}

TEST(ExactOt, OneDimensionalEqualsExact1d) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto xs = uniform_list(1 + trial % 7, rng);
    const auto ys = uniform_list(1 + trial % 7, rng);
    for (double p : {1.0, 2.0}) {
      const double exact = exact_ot_distance(PointSet::from_scalars(xs), PointSet::from_scalars(ys), p);
      EXPECT_NEAR(exact, exact_1d_wasserstein(xs, ys, p), 1e-9);
      EXPECT_NEAR(sliced_wasserstein(PointSet::from_scalars(xs), PointSet::from_scalars(ys),
                                     {p, 8, static_cast<std::uint64_t>(trial)}),
                  exact, 1e-9);
    }
  }
}

TEST(ExactOt, UnsupportedInstances) {
  std::mt19937_64 rng(13);
  EXPECT_THROW(exact_ot_distance(random_set(3, 2, rng), random_set(4, 2, rng), 1),
               UnsupportedInstance);
  EXPECT_THROW(exact_ot_distance(random_set(11, 2, rng), random_set(11, 2, rng), 1),
               UnsupportedInstance);
}

TEST(PointSetTest, RejectsBadShapes) {
  EXPECT_THROW(PointSet(0, 1, {}), InvalidInput);
  EXPECT_THROW(PointSet(2, 2, {1, 2, 3}), InvalidInput);
  EXPECT_THROW(PointSet(1, 1, {NAN}), InvalidInput);
  EXPECT_THROW(PointSet::from_rows({{1, 2}, {3}}), InvalidInput);
}

}  // namespace
}  // namespace watch
