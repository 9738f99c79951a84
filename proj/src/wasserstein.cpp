#include "watch/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "watch/error.hpp"
#include "watch/kernels.hpp"

namespace watch {
namespace {

constexpr std::size_t kMaxOracleSize = 10;

inline double cost(double gap, double p) noexcept {
  gap = std::abs(gap);
  if (p == 1.0) return gap;
  if (p == 2.0) return gap * gap;
  return std::pow(gap, p);
}

inline double root(double total, double p) noexcept {
  if (p == 1.0) return total;
  if (p == 2.0) return std::sqrt(total);
  return std::pow(total, 1.0 / p);
}

void check_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InvalidInput("Wasserstein order p must be a finite value >= 1");
  }
}

void check_samples(std::span<const double> v, const char* which) {
  if (v.empty()) {
    throw InvalidInput(std::string(which) + " sample list is empty");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvalidInput(std::string(which) + " sample list has a non-finite value");
    }
  }
}

}  // namespace

void DistanceConfig::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ConfigInvalid("p must be a finite value >= 1");
  }
  if (n_projections == 0) {
    throw ConfigInvalid("n_projections must be positive");
  }
}

double wasserstein_1d_sorted(std::span<const double> xs,
                             std::span<const double> ys, double p) noexcept {
  const std::uint64_t n = xs.size();
  const std::uint64_t m = ys.size();
  if (n == m) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost(xs[i] - ys[i], p);
    return root(total / static_cast<double>(n), p);
  }
  // Quantile breakpoints i/n and j/m, both scaled to the grid 1/(n*m).
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint64_t at = 0;
  double total = 0.0;
  while (i < n && j < m) {
    const std::uint64_t next_x = (i + 1) * m;
    const std::uint64_t next_y = (j + 1) * n;
    const std::uint64_t next = std::min(next_x, next_y);
    total += static_cast<double>(next - at) * cost(xs[i] - ys[j], p);
    at = next;
    if (next_x == next) ++i;
    if (next_y == next) ++j;
  }
  return root(total / (static_cast<double>(n) * static_cast<double>(m)), p);
}

double exact_1d_wasserstein(std::span<const double> xs,
                            std::span<const double> ys, double p) {
  check_samples(xs, "first");
  check_samples(ys, "second");
  check_order(p);
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return wasserstein_1d_sorted(a, b, p);
}

std::vector<double> draw_directions(std::size_t d, const DistanceConfig& cfg) {
  cfg.validate();
  if (d == 0) throw InvalidInput("direction dimension must be positive");
  std::mt19937_64 gen(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> dirs(cfg.n_projections * d);
  for (std::size_t s = 0; s < cfg.n_projections; ++s) {
    double* u = dirs.data() + s * d;
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        u[c] = normal(gen);
        norm2 += u[c] * u[c];
      }
    } while (norm2 == 0.0);
    const double norm = std::sqrt(norm2);
    for (std::size_t c = 0; c < d; ++c) u[c] /= norm;
  }
  return dirs;
}

SortedSlices SortedSlices::merge(std::span<const SortedSlices* const> parts) {
  if (parts.empty()) throw InvalidInput("nothing to merge");
  const std::size_t k = parts.front()->slices();
  std::size_t n = 0;
  for (const auto* part : parts) {
    if (part->slices() != k) throw InvalidInput("slice counts differ");
    n += part->points();
  }
  std::vector<double> values(k * n);
  for (std::size_t s = 0; s < k; ++s) {
    double* dst = values.data() + s * n;
    std::size_t filled = 0;
    for (const auto* part : parts) {
      const auto src = part->slice(s);
      std::copy(src.begin(), src.end(), dst + filled);
      std::inplace_merge(dst, dst + filled, dst + filled + src.size());
      filled += src.size();
    }
  }
  return SortedSlices(k, n, std::move(values));
}

SlicedProjector::SlicedProjector(std::size_t dim, const DistanceConfig& cfg)
    : dim_(dim), cfg_(cfg), directions_(draw_directions(dim, cfg)) {}

SortedSlices SlicedProjector::project(const PointSet& points) const {
  if (points.dim() != dim_) {
    throw InvalidInput("point set has dimension " + std::to_string(points.dim()) +
                       ", projector expects " + std::to_string(dim_));
  }
  const std::size_t k = cfg_.n_projections;
  const std::size_t n = points.size();
  std::vector<double> values(k * n);
  kernels::project(points.values(), dim_, directions_, values);
  for (std::size_t s = 0; s < k; ++s) {
    std::sort(values.begin() + static_cast<std::ptrdiff_t>(s * n),
              values.begin() + static_cast<std::ptrdiff_t>((s + 1) * n));
  }
  return SortedSlices(k, n, std::move(values));
}

double SlicedProjector::distance(const SortedSlices& a,
                                 const SortedSlices& b) const noexcept {
  double total = 0.0;
  for (std::size_t s = 0; s < cfg_.n_projections; ++s) {
    total += wasserstein_1d_sorted(a.slice(s), b.slice(s), cfg_.p);
  }
  return total / static_cast<double>(cfg_.n_projections);
}

double sliced_wasserstein(const PointSet& a, const PointSet& b,
                          const DistanceConfig& cfg) {
  if (a.dim() != b.dim()) {
    throw InvalidInput("dimension mismatch: " + std::to_string(a.dim()) +
                       " vs " + std::to_string(b.dim()));
  }
  const SlicedProjector projector(a.dim(), cfg);
  return projector.distance(projector.project(a), projector.project(b));
}

double exact_ot_distance(const PointSet& a, const PointSet& b, double p) {
  check_order(p);
  if (a.dim() != b.dim()) throw InvalidInput("dimension mismatch");
  if (a.size() != b.size() || a.size() > kMaxOracleSize) {
    throw UnsupportedInstance(
        "exact transport oracle needs equal sizes of at most 10 points");
  }
  const std::size_t n = a.size();
  // Pairwise costs once, then every permutation.
  std::vector<double> pair_cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double sq = 0.0;
      const auto x = a.row(i);
      const auto y = b.row(j);
      for (std::size_t c = 0; c < a.dim(); ++c) {
        const double g = x[c] - y[c];
        sq += g * g;
      }
      pair_cost[i * n + j] = cost(std::sqrt(sq), p);
    }
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += pair_cost[i * n + perm[i]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return root(best / static_cast<double>(n), p);
}

}  // namespace watch
