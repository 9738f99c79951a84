#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace watch {

/// Rows are datasets, columns are methods; higher scores are better and
/// std::nullopt marks a missing result.
using ScoreTable = std::vector<std::vector<std::optional<double>>>;

/// Ranks methods within each dataset (1 = best, ties share the average of
/// their ranks, missing entries share the last ranks) and averages per
/// method. Throws InvalidInput for an empty or ragged table, or a row with
/// fewer than two present entries.
std::vector<double> average_ranks(const ScoreTable& table);

/// Ranks of one row, as used by average_ranks.
std::vector<double> rank_row(std::span<const std::optional<double>> row);

/// Holm step-down adjustment, returned in input order. Throws InvalidInput
/// for values outside [0, 1].
std::vector<double> holm_adjust(std::span<const double> pvalues);

struct FriedmanResult {
  double chi_square = 0.0;
  double p_value = 1.0;         ///< chi-square with k - 1 degrees of freedom
  double iman_davenport = 0.0;  ///< F-distributed variant of the statistic
  std::size_t datasets = 0;
  std::size_t methods = 0;
};

FriedmanResult friedman_test(std::span<const double> mean_ranks, std::size_t datasets);

struct PairwiseComparison {
  std::size_t a = 0;
  std::size_t b = 0;
  double p_raw = 1.0;
  double p_holm = 1.0;
};

/// All method pairs compared on mean rank difference with the normal
/// approximation z = |R_a - R_b| / sqrt(k (k + 1) / (6 N)), two-sided,
/// then Holm-adjusted across pairs.
std::vector<PairwiseComparison> rank_posthoc(std::span<const double> mean_ranks,
                                             std::size_t datasets);

}  // namespace watch
