#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "watch/data.hpp"
#include "watch/detector.hpp"
#include "watch/error.hpp"

namespace watch {
namespace {

WatchConfig reference_config() {
  WatchConfig cfg;
  cfg.omega = 20;
  cfg.kappa = 60;
  cfg.mu = 200;
  cfg.epsilon = 2.0;
  cfg.distance = {2.0, 128, 42};
  return cfg;
}

PointSet shift_series(std::vector<std::size_t> cps, std::size_t T, std::size_t d,
                      std::uint64_t seed, double shift = 5.0) {
  SynthSpec spec;
  spec.T = T;
  spec.d = d;
  spec.change_indices = std::move(cps);
  spec.shift_magnitude = shift;
  spec.seed = seed;
  return synth_mean_shift(spec).values;
}

// Means alternate 0, 5, 0, ... instead of the generator's increasing means.
PointSet up_down_series(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v;
  for (int t = 0; t < 600; ++t) v.push_back((t >= 200 && t < 400 ? 5.0 : 0.0) + normal(rng));
  return PointSet(600, 1, v);
}

TEST(WatchConfigTest, Validation) {
  EXPECT_NO_THROW(reference_config().validate());
  WatchConfig cfg = reference_config();
  cfg.mu = 50;
  EXPECT_THROW(Detector{cfg}, ConfigInvalid);
  cfg = reference_config();
  cfg.kappa = 39;
  EXPECT_THROW(Detector{cfg}, ConfigInvalid);
  cfg.kappa = 40;  // exactly 2 * omega
  EXPECT_NO_THROW(Detector{cfg});
  cfg = reference_config();
  cfg.epsilon = 0.0;
  EXPECT_THROW(Detector{cfg}, ConfigInvalid);
  cfg = reference_config();
  cfg.omega = 0;
  EXPECT_THROW(Detector{cfg}, ConfigInvalid);
  // kappa = 50 with omega = 20 fills to 60 points before detection starts.
  cfg = reference_config();
  cfg.kappa = 50;
  cfg.mu = 55;
  EXPECT_THROW(Detector{cfg}, ConfigInvalid);
  cfg.mu = 60;
  EXPECT_NO_THROW(Detector{cfg});
}

TEST(DetectorTest, FreshState) {
  const Detector det(reference_config());
  EXPECT_EQ(det.samples_seen(), 0u);
  EXPECT_TRUE(det.buffer().empty());
  EXPECT_FALSE(det.threshold().has_value());
  EXPECT_TRUE(det.change_points().empty());
}

TEST(ThresholdTest, TwoBatchExample) {
  DistributionBuffer buf;
  buf.push_back(PointSet::from_scalars(std::vector{0.0, 0.0}));
  buf.push_back(PointSet::from_scalars(std::vector{1.0, 1.0}));
  // Each batch against the pooled {0,0,1,1}: replicate to equal sizes and
  // enumerate matchings.
  EXPECT_DOUBLE_EQ(oracle::permutation_wasserstein_1d({0, 0, 0, 0}, {0, 0, 1, 1}, 1), 0.5);
  EXPECT_DOUBLE_EQ(compute_threshold(buf, 2.0, {1.0, 16, 42}), 1.0);
}

TEST(ThresholdTest, IdenticalBatchesGiveZero) {
  DistributionBuffer buf;
  const auto b = PointSet::from_rows({{1, 2}, {3, 4}, {0, 1}});
  for (int i = 0; i < 4; ++i) buf.push_back(b);
  EXPECT_EQ(compute_threshold(buf, 3.0, {}), 0.0);
}

TEST(ThresholdTest, LinearInEpsilon) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  DistributionBuffer buf;
  for (int b = 0; b < 3; ++b) {
    std::vector<double> v(10 * 3);
    for (auto& x : v) x = normal(rng);
    buf.push_back(PointSet(10, 3, v));
  }
  const DistanceConfig dcfg{2.0, 32, 5};
  const double base = compute_threshold(buf, 1.0, dcfg);
  EXPECT_GT(base, 0.0);
  EXPECT_EQ(compute_threshold(buf, 2.0, dcfg), 2.0 * base);
  EXPECT_DOUBLE_EQ(compute_threshold(buf, 0.7, dcfg), 0.7 * base);
}

TEST(ThresholdTest, SingleBatchIsDegenerate) {
  DistributionBuffer buf;
  buf.push_back(PointSet::from_scalars(std::vector{0.0, 1.0}));
  EXPECT_THROW(compute_threshold(buf, 1.0, {}), DegenerateBuffer);
}

TEST(DetectorTest, ConstantSeriesNeverFires) {
  for (std::size_t omega : {1u, 5u, 20u}) {
    WatchConfig cfg;
    cfg.omega = omega;
    cfg.kappa = 2 * omega;
    cfg.mu = 10 * omega;
    cfg.epsilon = 0.1;
    const PointSet series(400, 2, std::vector<double>(800, 3.25));
    EXPECT_TRUE(process_series(series, cfg).empty());
  }
}

TEST(DetectorTest, NothingBeforeKappa) {
  WatchConfig cfg = reference_config();
  cfg.kappa = 100;
  // 80 samples with a huge shift halfway: detection never activates.
  EXPECT_TRUE(process_series(shift_series({40}, 80, 1, 3, 100.0), cfg).empty());
}

TEST(DetectorTest, SingleShift) {
  const auto series = shift_series({200}, 400, 1, 42);
  const auto cps = process_series(series, reference_config());
  ASSERT_EQ(cps.size(), 1u);
  EXPECT_GE(cps[0].index, 200u);
  EXPECT_LE(cps[0].index, 240u);
  EXPECT_EQ(cps[0].index, cps[0].batch_ordinal * 20);
  EXPECT_GT(cps[0].distance, cps[0].threshold);

  // The triggering batch lies entirely in the shifted regime.
  const auto batch = series.slice(cps[0].index - 20, 20);
  std::vector<double> b(batch.values().begin(), batch.values().end());
  std::vector<double> ref(b.size(), 0.0);
  EXPECT_GT(oracle::permutation_wasserstein_1d({b.begin(), b.begin() + 8}, {ref.begin(), ref.begin() + 8}, 2), 3.0);
}

TEST(DetectorTest, FoldOfStepMatchesProcessSeries) {
  const auto series = shift_series({200}, 400, 3, 8);
  const auto cfg = reference_config();
  Detector det(cfg);
  for (std::size_t b = 0; b < 20; ++b) det.step(series.slice(b * 20, 20));
  EXPECT_EQ(det.change_points(), process_series(series, cfg));
  EXPECT_EQ(det.samples_seen(), 400u);
}

TEST(DetectorTest, TrailingRemainderDropped) {
  WatchConfig cfg = reference_config();
  cfg.kappa = 40;
  std::vector<double> v(60, 0.0);
  for (int t = 40; t < 60; ++t) v[t] = 50.0 + t;
  // 60 samples: the third batch is compared and fires at index 60.
  const auto full = process_series(PointSet(60, 1, v), cfg);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].index, 60u);
  // 59 samples: only two batches exist.
  v.pop_back();
  EXPECT_TRUE(process_series(PointSet(59, 1, v), cfg).empty());
}

TEST(DetectorTest, TwoShifts) {
  const auto cps = process_series(up_down_series(42), reference_config());
  ASSERT_EQ(cps.size(), 2u);
  EXPECT_GE(cps[0].index, 200u);
  EXPECT_LE(cps[0].index, 240u);
  EXPECT_GE(cps[1].index, 400u);
  EXPECT_LE(cps[1].index, 440u);
}

TEST(DetectorTest, StepErrors) {
  Detector det(reference_config());
  EXPECT_THROW(det.step(PointSet(19, 1, std::vector<double>(19, 0.0))), InvalidInput);
  det.step(PointSet(20, 1, std::vector<double>(20, 0.0)));
  EXPECT_THROW(det.step(PointSet(20, 2, std::vector<double>(40, 0.0))), InvalidInput);
}

TEST(DetectorTest, CachedPathMatchesReferenceBitwise) {
  const auto series = shift_series({150, 300}, 500, 4, 17);
  const auto cfg = reference_config();
  Detector det(cfg);
  for (std::size_t b = 0; b < 25; ++b) {
    const auto batch = series.slice(b * 20, 20);
    const std::optional<double> eta_before = det.threshold();
    const bool comparing = det.buffer().total_points() >= cfg.kappa;
    const double expected_distance =
        comparing ? sliced_wasserstein(batch, det.buffer().all_points(), cfg.distance) : 0.0;
    const auto cp = det.step(batch);
    if (cp) {
      EXPECT_EQ(cp->distance, expected_distance);
      EXPECT_EQ(cp->threshold, *eta_before);
    }
    if (det.threshold()) {
      EXPECT_EQ(*det.threshold(), compute_threshold(det.buffer(), cfg.epsilon, cfg.distance));
    }
  }
}

struct Trace {
  std::vector<std::size_t> totals;
  std::vector<bool> fired;
};

Trace drive(Detector& det, const PointSet& series) {
  Trace tr;
  const std::size_t omega = det.config().omega;
  for (std::size_t b = 0; b < series.size() / omega; ++b) {
    const auto batch = series.slice(b * omega, omega);
    const auto cp = det.step(batch);
    tr.fired.push_back(cp.has_value());
    tr.totals.push_back(det.buffer().total_points());
    if (cp) {
      EXPECT_EQ(det.buffer().batch_count(), 1u);
      EXPECT_EQ(det.buffer().batches().front(), batch);
    }
    EXPECT_EQ(det.threshold().has_value(), det.buffer().total_points() >= det.config().kappa);
  }
  return tr;
}

TEST(DetectorInvariants, EmittedIndicesAndGaps) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    WatchConfig cfg;
    cfg.omega = 10;
    cfg.kappa = 30;
    cfg.mu = 100;
    cfg.epsilon = 1.0;  // low ratio: many firings to exercise the gaps
    const auto series = shift_series({100, 200, 300}, 400, 2, seed);
    const auto cps = process_series(series, cfg);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      EXPECT_EQ(cps[i].index % cfg.omega, 0u);
      if (i > 0) {
        EXPECT_GT(cps[i].index, cps[i - 1].index);
        EXPECT_GE(cps[i].batch_ordinal - cps[i - 1].batch_ordinal, 3u);
      }
    }
  }
}

TEST(DetectorInvariants, StopAddingCapacity) {
  WatchConfig cfg;
  cfg.omega = 10;
  cfg.kappa = 20;
  cfg.mu = 55;
  cfg.epsilon = 3.0;
  Detector det(cfg);
  const auto tr = drive(det, shift_series({250}, 500, 2, 9));
  for (std::size_t i = 0; i < tr.totals.size(); ++i) {
    EXPECT_LE(tr.totals[i], cfg.mu);
    if (i > 0 && !tr.fired[i]) { EXPECT_GE(tr.totals[i], tr.totals[i - 1]); }
  }
  EXPECT_EQ(*std::max_element(tr.totals.begin(), tr.totals.end()), 50u);
}

TEST(DetectorInvariants, FifoKeepsMostRecent) {
  WatchConfig cfg;
  cfg.omega = 10;
  cfg.kappa = 20;
  cfg.mu = 55;
  cfg.epsilon = 3.0;
  cfg.eviction = Eviction::fifo;
  Detector det(cfg);
  const auto series = shift_series({}, 300, 2, 10);
  std::size_t last_fire = 0;
  for (std::size_t b = 0; b < 30; ++b) {
    const auto batch = series.slice(b * 10, 10);
    if (det.step(batch)) last_fire = b;
    EXPECT_LE(det.buffer().total_points(), cfg.mu);
    // Retained batches are the latest ones, in order.
    const auto& kept = det.buffer().batches();
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const std::size_t source = b + 1 - kept.size() + k;
      if (source >= last_fire) { EXPECT_EQ(kept[k], series.slice(source * 10, 10)); }
    }
    if (det.threshold()) {
      EXPECT_EQ(*det.threshold(), compute_threshold(det.buffer(), cfg.epsilon, cfg.distance));
    }
  }
}

TEST(DetectorInvariants, FirstChangeNondecreasingInEpsilon) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto series = shift_series({120, 240}, 360, 3, seed, 1.5);
    std::size_t previous = 0;
    for (double eps : {0.5, 0.8, 1.0, 1.3, 1.7, 2.2, 3.0, 5.0}) {
      WatchConfig cfg = reference_config();
      cfg.epsilon = eps;
      const auto cps = process_series(series, cfg);
      const std::size_t first = cps.empty() ? SIZE_MAX : cps.front().index;
      EXPECT_GE(first, previous) << "eps " << eps;
      previous = first;
    }
  }
}

TEST(DetectorInvariants, Deterministic) {
  const auto series = shift_series({100, 260}, 400, 5, 77);
  WatchConfig cfg = reference_config();
  cfg.epsilon = 1.2;
  const auto a = process_series(series, cfg);
  const auto b = process_series(series, cfg);
  EXPECT_EQ(a, b);
}

TEST(DetectorTest, DeadlineInThePast) {
  const auto series = shift_series({}, 400, 2, 1);
  EXPECT_THROW(process_series(series, reference_config(),
                              std::chrono::steady_clock::now() - std::chrono::seconds(1)),
               Timeout);
}

}  // namespace
}  // namespace watch
