#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "watch/point_set.hpp"

namespace watch {

struct DistanceConfig {
  double p = 2.0;                    ///< transport order, >= 1
  std::size_t n_projections = 128;   ///< random slicing directions
  std::uint64_t seed = 42;           ///< direction generator seed

  /// Throws ConfigInvalid.
  void validate() const;

  friend bool operator==(const DistanceConfig&, const DistanceConfig&) = default;
};

/// Exact p-Wasserstein distance between two 1-D empirical distributions,
/// integrating |F^-1(u) - G^-1(u)|^p over the merged quantile grid. Sample
/// counts may differ. Throws InvalidInput on empty or non-finite input.
double exact_1d_wasserstein(std::span<const double> xs,
                            std::span<const double> ys, double p);

/// Same as exact_1d_wasserstein for already sorted, nonempty inputs; no checks.
double wasserstein_1d_sorted(std::span<const double> xs,
                             std::span<const double> ys, double p) noexcept;

/// k x d row-major unit directions: Gaussian draws from a generator seeded
/// with cfg.seed, each normalized to unit length.
std::vector<double> draw_directions(std::size_t d, const DistanceConfig& cfg);

/// Per-slice sorted projections of a point set, k rows of n values.
class SortedSlices {
 public:
  SortedSlices() = default;
  SortedSlices(std::size_t k, std::size_t n, std::vector<double> values)
      : k_(k), n_(n), values_(std::move(values)) {}

  std::size_t slices() const noexcept { return k_; }
  std::size_t points() const noexcept { return n_; }
  std::span<const double> slice(std::size_t s) const noexcept {
    return {values_.data() + s * n_, n_};
  }

  /// Per-slice sorted union of several projections taken with the same
  /// directions.
  static SortedSlices merge(std::span<const SortedSlices* const> parts);

 private:
  std::size_t k_ = 0;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Sliced distance with a fixed direction set. Projecting once and reusing
/// the sorted slices gives results bit-identical to sliced_wasserstein.
class SlicedProjector {
 public:
  SlicedProjector(std::size_t dim, const DistanceConfig& cfg);

  std::size_t dim() const noexcept { return dim_; }
  const DistanceConfig& config() const noexcept { return cfg_; }

  SortedSlices project(const PointSet& points) const;

  /// Mean over slices of the exact 1-D distance.
  double distance(const SortedSlices& a, const SortedSlices& b) const noexcept;

 private:
  std::size_t dim_;
  DistanceConfig cfg_;
  std::vector<double> directions_;
};

/// Sliced p-Wasserstein approximation of the d-dimensional distance.
/// Deterministic for fixed inputs and cfg. Throws InvalidInput on dimension
/// mismatch and ConfigInvalid on a bad cfg.
double sliced_wasserstein(const PointSet& a, const PointSet& b,
                          const DistanceConfig& cfg);

/// Exact Euclidean p-Wasserstein distance by enumerating all matchings.
/// Test oracle: requires equal sizes and n <= 10, else UnsupportedInstance.
double exact_ot_distance(const PointSet& a, const PointSet& b, double p);

}  // namespace watch
