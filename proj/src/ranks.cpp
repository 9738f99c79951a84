#include "watch/ranks.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "watch/error.hpp"

namespace watch {

std::vector<double> rank_row(std::span<const std::optional<double>> row) {
  const std::size_t m = row.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Present scores descending, then all missing entries.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (row[x].has_value() != row[y].has_value()) return row[x].has_value();
    if (!row[x]) return false;
    return *row[x] > *row[y];
  });
  auto same = [&](std::size_t x, std::size_t y) {
    if (row[x].has_value() != row[y].has_value()) return false;
    return !row[x] || *row[x] == *row[y];
  };
  std::vector<double> ranks(m);
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i + 1;
    while (j < m && same(order[i], order[j])) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

std::vector<double> average_ranks(const ScoreTable& table) {
  if (table.empty() || table.front().empty()) {
    throw InvalidInput("score table is empty");
  }
  const std::size_t m = table.front().size();
  std::vector<double> sum(m, 0.0);
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() != m) throw InvalidInput("score table rows differ in length");
    std::size_t present = 0;
    for (const auto& v : row) {
      if (v) {
        if (!std::isfinite(*v)) throw InvalidInput("score table holds a non-finite score");
        ++present;
      }
    }
    if (present < 2) {
      throw InvalidInput("dataset row " + std::to_string(r) +
                         " needs at least two present scores");
    }
    const auto ranks = rank_row(row);
    for (std::size_t c = 0; c < m; ++c) sum[c] += ranks[c];
  }
  for (auto& s : sum) s /= static_cast<double>(table.size());
  return sum;
}

std::vector<double> holm_adjust(std::span<const double> pvalues) {
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("p-values must lie in [0, 1]");
  }
  const std::size_t m = pvalues.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pvalues[x] < pvalues[y]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double scaled =
        std::min(1.0, static_cast<double>(m - i) * pvalues[order[i]]);
    running = std::max(running, scaled);
    adjusted[order[i]] = running;
  }
  return adjusted;
}

FriedmanResult friedman_test(std::span<const double> mean_ranks, std::size_t datasets) {
  const std::size_t k = mean_ranks.size();
  if (k < 2 || datasets == 0) {
    throw InvalidInput("Friedman test needs at least two methods and one dataset");
  }
  const double kd = static_cast<double>(k);
  const double n = static_cast<double>(datasets);
  double sum_sq = 0.0;
  for (double r : mean_ranks) sum_sq += r * r;
  FriedmanResult out;
  out.datasets = datasets;
  out.methods = k;
  out.chi_square =
      std::max(0.0, 12.0 * n / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0));
  out.p_value = boost::math::gamma_q((kd - 1.0) / 2.0, out.chi_square / 2.0);
  const double denom = n * (kd - 1.0) - out.chi_square;
  out.iman_davenport = denom > 0.0 ? (n - 1.0) * out.chi_square / denom
                                   : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<PairwiseComparison> rank_posthoc(std::span<const double> mean_ranks,
                                             std::size_t datasets) {
  const std::size_t k = mean_ranks.size();
  if (k < 2 || datasets == 0) {
    throw InvalidInput("post-hoc comparison needs at least two methods and one dataset");
  }
  const double kd = static_cast<double>(k);
  const double se = std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(datasets)));
  std::vector<PairwiseComparison> pairs;
  std::vector<double> raw;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double z = std::abs(mean_ranks[a] - mean_ranks[b]) / se;
      const double p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
      pairs.push_back({a, b, p, p});
      raw.push_back(p);
    }
  }
  const auto adjusted = holm_adjust(raw);
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].p_holm = adjusted[i];
  return pairs;
}

}  // namespace watch
