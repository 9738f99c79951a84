#include "watch/point_set.hpp"

#include <cmath>
#include <string>

#include "watch/error.hpp"

namespace watch {

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (n_ == 0 || d_ == 0) {
    throw InvalidInput("point set needs at least one point and one dimension");
  }
  if (values_.size() != n_ * d_) {
    throw InvalidInput("point set holds " + std::to_string(values_.size()) +
                       " values, expected " + std::to_string(n_ * d_));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw InvalidInput("non-finite coordinate at point " +
                         std::to_string(k / d_) + ", dimension " +
                         std::to_string(k % d_));
    }
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) {
    throw InvalidInput("point set needs at least one point");
  }
  const std::size_t d = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) {
      throw InvalidInput("rows of a point set must share one dimension");
    }
    values.insert(values.end(), r.begin(), r.end());
  }
  return PointSet(rows.size(), d, std::move(values));
}

PointSet PointSet::from_scalars(std::span<const double> values) {
  return PointSet(values.size(), 1,
                  std::vector<double>(values.begin(), values.end()));
}

PointSet PointSet::slice(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > n_) {
    throw InvalidInput("row slice out of range");
  }
  const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(first * d_);
  return PointSet(count, d_,
                  std::vector<double>(
                      begin, begin + static_cast<std::ptrdiff_t>(count * d_)));
}

PointSet concatenate(std::span<const PointSet> parts) {
  if (parts.empty()) {
    throw InvalidInput("nothing to concatenate");
  }
  const std::size_t d = parts.front().dim();
  std::size_t n = 0;
  for (const auto& p : parts) {
    if (p.dim() != d) {
      throw InvalidInput("dimension mismatch in concatenation");
    }
    n += p.size();
  }
  std::vector<double> values;
  values.reserve(n * d);
  for (const auto& p : parts) {
    values.insert(values.end(), p.values().begin(), p.values().end());
  }
  return PointSet(n, d, std::move(values));
}

}  // namespace watch
