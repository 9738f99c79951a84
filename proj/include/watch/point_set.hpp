#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace watch {

/// An n x d collection of finite samples stored row-major. Used both as an
/// empirical distribution and, when row order matters, as a time series.
class PointSet {
 public:
  /// Validates shape and finiteness; throws InvalidInput.
  PointSet(std::size_t n, std::size_t d, std::vector<double> values);

  static PointSet from_rows(const std::vector<std::vector<double>>& rows);
  /// One-dimensional set with one point per value.
  static PointSet from_scalars(std::span<const double> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * d_, d_};
  }
  std::span<const double> values() const noexcept { return values_; }

  /// Copy of rows [first, first + count).
  PointSet slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> values_;
};

/// Row-wise concatenation; all parts must share a dimension.
PointSet concatenate(std::span<const PointSet> parts);

}  // namespace watch
