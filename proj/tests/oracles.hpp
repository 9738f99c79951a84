#pragma once

// Brute-force evaluators used as test oracles. None of them share code
// paths with the library implementations they check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

namespace watch::oracle {

/// 1-D transport cost by enumerating every matching of equal-size lists.
inline double permutation_wasserstein_1d(const std::vector<double>& xs,
                                         const std::vector<double>& ys, double p) {
  std::vector<std::size_t> perm(ys.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      total += std::pow(std::abs(xs[i] - ys[perm[i]]), p);
    }
    best = std::min(best, total / static_cast<double>(xs.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(best, 1.0 / p);
}

/// Index sets as bitmasks over a short series (T <= 32).
using Mask = std::uint32_t;

inline std::vector<Mask> segments_as_masks(Mask cut_points, int T) {
  std::vector<Mask> segs;
  Mask current = 0;
  for (int i = 0; i < T; ++i) {
    if (i > 0 && (cut_points >> i & 1u)) {
      segs.push_back(current);
      current = 0;
    }
    current |= Mask{1} << i;
  }
  segs.push_back(current);
  return segs;
}

inline double set_jaccard(Mask a, Mask b) {
  return static_cast<double>(std::popcount(a & b)) / static_cast<double>(std::popcount(a | b));
}

/// Covering with every (truth segment, predicted segment) pair enumerated.
inline double brute_covering(Mask predicted_cps, Mask truth_cps, int T) {
  const auto pred = segments_as_masks(predicted_cps, T);
  const auto truth = segments_as_masks(truth_cps, T);
  double total = 0.0;
  for (Mask a : truth) {
    double best = 0.0;
    for (Mask b : pred) best = std::max(best, set_jaccard(a, b));
    total += std::popcount(a) * best;
  }
  return total / T;
}

inline std::size_t gap(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

/// Maximum matching by exhaustive search over assignments (tiny inputs).
inline std::size_t enumerate_matching(const std::vector<std::size_t>& xs,
                                      const std::vector<std::size_t>& ts, std::size_t margin,
                                      std::size_t i = 0, Mask used = 0) {
  if (i == xs.size()) return 0;
  std::size_t best = enumerate_matching(xs, ts, margin, i + 1, used);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    if (!(used >> j & 1u) && gap(xs[i], ts[j]) <= margin) {
      best = std::max(best, 1 + enumerate_matching(xs, ts, margin, i + 1, used | Mask{1} << j));
    }
  }
  return best;
}

/// Maximum bipartite matching by augmenting paths (Kuhn).
inline std::size_t kuhn_matching(const std::vector<std::size_t>& xs,
                                 const std::vector<std::size_t>& ts, std::size_t margin) {
  std::vector<int> owner(ts.size(), -1);
  std::vector<char> seen;
  auto augment = [&](auto&& self, std::size_t x) -> bool {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (seen[j] || gap(xs[x], ts[j]) > margin) continue;
      seen[j] = 1;
      if (owner[j] < 0 || self(self, static_cast<std::size_t>(owner[j]))) {
        owner[j] = static_cast<int>(x);
        return true;
      }
    }
    return false;
  };
  std::size_t matched = 0;
  for (std::size_t x = 0; x < xs.size(); ++x) {
    seen.assign(ts.size(), 0);
    if (augment(augment, x)) ++matched;
  }
  return matched;
}

/// Precision/recall for one annotator with the implicit origin point.
inline std::pair<double, double> brute_precision_recall(std::vector<std::size_t> pred,
                                                        std::vector<std::size_t> truth,
                                                        std::size_t margin) {
  if (std::find(pred.begin(), pred.end(), 0) == pred.end()) pred.insert(pred.begin(), 0);
  if (std::find(truth.begin(), truth.end(), 0) == truth.end()) truth.insert(truth.begin(), 0);
  const double m = static_cast<double>(kuhn_matching(pred, truth, margin));
  return {m / static_cast<double>(pred.size()), m / static_cast<double>(truth.size())};
}

inline std::vector<std::size_t> mask_indices(Mask m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < 32; ++i) {
    if (m >> i & 1u) out.push_back(i);
  }
  return out;
}

}  // namespace watch::oracle
