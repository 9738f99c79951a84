#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "watch/point_set.hpp"
#include "watch/wasserstein.hpp"

namespace watch {

enum class Eviction {
  stop_adding,  ///< batches stop being absorbed once the buffer is full
  fifo,         ///< oldest batches are dropped to make room
};

std::string_view eviction_name(Eviction e) noexcept;
std::optional<Eviction> parse_eviction(std::string_view name) noexcept;

struct WatchConfig {
  std::size_t kappa = 60;   ///< points buffered before detection activates
  std::size_t mu = 600;     ///< buffer capacity in points
  double epsilon = 1.5;     ///< threshold ratio
  std::size_t omega = 20;   ///< mini-batch size
  DistanceConfig distance{};
  Eviction eviction = Eviction::stop_adding;

  /// Rules: omega >= 1, kappa >= 2 * omega, mu >= kappa, mu large enough to
  /// hold the activation buffer (omega * ceil(kappa / omega) points),
  /// epsilon > 0, and a valid distance config. Throws ConfigInvalid.
  void validate() const;

  friend bool operator==(const WatchConfig&, const WatchConfig&) = default;
};

/// The current distribution: an ordered run of equally sized batches.
class DistributionBuffer {
 public:
  std::size_t total_points() const noexcept { return total_; }
  std::size_t batch_count() const noexcept { return batches_.size(); }
  bool empty() const noexcept { return batches_.empty(); }
  const std::deque<PointSet>& batches() const noexcept { return batches_; }

  void push_back(PointSet batch);
  void pop_front();
  void clear() noexcept;

  /// All buffered points, oldest batch first.
  PointSet all_points() const;

 private:
  std::deque<PointSet> batches_;
  std::size_t total_ = 0;
};

struct ChangePoint {
  std::size_t index = 0;          ///< batch_ordinal * omega
  std::size_t batch_ordinal = 0;  ///< 1-based
  double distance = 0.0;
  double threshold = 0.0;

  friend bool operator==(const ChangePoint&, const ChangePoint&) = default;
};

/// Threshold rule: epsilon times the largest sliced distance between a
/// buffered batch and the whole buffer (that batch included). Evaluated with
/// independent sliced_wasserstein calls. Throws DegenerateBuffer when the
/// buffer holds fewer than two batches.
double compute_threshold(const DistributionBuffer& buffer, double epsilon,
                         const DistanceConfig& dcfg);

/// Streaming detector state. Feed batches of exactly omega points in time
/// order; single owner, not internally synchronized.
class Detector {
 public:
  explicit Detector(const WatchConfig& cfg);

  /// Processes the next batch; returns the change point it triggers, if any.
  /// Throws InvalidInput on a wrong batch size or dimension.
  std::optional<ChangePoint> step(const PointSet& batch);

  const WatchConfig& config() const noexcept { return cfg_; }
  const DistributionBuffer& buffer() const noexcept { return buffer_; }
  /// Defined iff the buffer holds at least kappa points.
  std::optional<double> threshold() const noexcept { return eta_; }
  const std::vector<ChangePoint>& change_points() const noexcept { return emitted_; }
  std::size_t samples_seen() const noexcept { return samples_seen_; }
  std::size_t batches_seen() const noexcept { return batches_seen_; }

 private:
  void absorb(PointSet batch, SortedSlices slices);
  void refresh_threshold();

  WatchConfig cfg_;
  std::optional<SlicedProjector> projector_;
  DistributionBuffer buffer_;
  std::deque<SortedSlices> batch_slices_;  // parallel to buffer_.batches()
  SortedSlices buffer_slices_;             // union of batch_slices_
  std::optional<double> eta_;
  std::vector<ChangePoint> emitted_;
  std::size_t samples_seen_ = 0;
  std::size_t batches_seen_ = 0;
};

using Deadline = std::chrono::steady_clock::time_point;

/// Splits the series into floor(T / omega) consecutive batches (a trailing
/// remainder is dropped) and folds them through a fresh Detector. With a
/// deadline, throws Timeout once it has passed between batches.
std::vector<ChangePoint> process_series(const PointSet& series,
                                        const WatchConfig& cfg,
                                        std::optional<Deadline> deadline = {});

}  // namespace watch
