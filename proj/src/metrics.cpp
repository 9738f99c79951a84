#include "watch/metrics.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "watch/error.hpp"

namespace watch {
namespace {

void require_strictly_increasing(std::span<const std::size_t> v,
                                 const std::string& what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) {
      throw InvalidInput(what + " must be strictly increasing");
    }
  }
}

void require_annotators(const AnnotationSet& truth) {
  if (truth.annotators.empty()) {
    throw EvalImpossible("annotation set has no annotators");
  }
}

std::vector<std::size_t> with_origin(std::span<const std::size_t> v) {
  std::vector<std::size_t> out;
  out.reserve(v.size() + 1);
  if (v.empty() || v.front() != 0) out.push_back(0);
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace

void AnnotationSet::validate() const {
  for (const auto& [id, cps] : annotators) {
    require_strictly_increasing(cps, "annotations of '" + id + "'");
    if (!cps.empty() && cps.back() >= series_length) {
      throw InvalidInput("annotation " + std::to_string(cps.back()) + " of '" +
                         id + "' is outside [0, " +
                         std::to_string(series_length) + ")");
    }
  }
}

Partition::Partition(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidInput("partition has no segments");
  std::size_t at = 0;
  for (const auto& s : segments_) {
    if (s.begin != at || s.end <= s.begin) {
      throw InvalidInput("partition segments must be nonempty and contiguous from 0");
    }
    at = s.end;
  }
}

Partition partition_from_changepoints(std::span<const std::size_t> cps,
                                      std::size_t series_length) {
  if (series_length == 0) throw InvalidInput("series length must be positive");
  require_strictly_increasing(cps, "change points");
  std::vector<Segment> segments;
  segments.reserve(cps.size() + 1);
  std::size_t begin = 0;
  for (std::size_t cp : cps) {
    if (cp == 0 || cp >= series_length) {
      throw InvalidInput("change point " + std::to_string(cp) +
                         " is outside (0, " + std::to_string(series_length) + ")");
    }
    segments.push_back({begin, cp});
    begin = cp;
  }
  segments.push_back({begin, series_length});
  return Partition(std::move(segments));
}

std::vector<std::size_t> interior_changepoints(std::span<const std::size_t> cps,
                                               std::size_t series_length) {
  std::set<std::size_t> kept;
  for (std::size_t cp : cps) {
    if (cp > 0 && cp < series_length) kept.insert(cp);
  }
  return {kept.begin(), kept.end()};
}

double jaccard(Segment a, Segment b) {
  if (a.size() == 0 && b.size() == 0) {
    throw InvalidInput("Jaccard index of two empty sets is undefined");
  }
  const std::size_t lo = std::max(a.begin, b.begin);
  const std::size_t hi = std::min(a.end, b.end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double covering(const Partition& predicted, const Partition& truth) {
  if (predicted.length() != truth.length()) {
    throw InvalidInput("partitions cover different series lengths");
  }
  const auto& pred = predicted.segments();
  double total = 0.0;
  std::size_t first = 0;  // first predicted segment that can overlap
  for (const auto& a : truth.segments()) {
    while (pred[first].end <= a.begin) ++first;
    double best = 0.0;
    for (std::size_t j = first; j < pred.size() && pred[j].begin < a.end; ++j) {
      best = std::max(best, jaccard(a, pred[j]));
    }
    total += static_cast<double>(a.size()) * best;
  }
  return total / static_cast<double>(truth.length());
}

double covering(const Partition& predicted, const AnnotationSet& truth) {
  require_annotators(truth);
  if (predicted.length() != truth.series_length) {
    throw InvalidInput("prediction length " + std::to_string(predicted.length()) +
                       " differs from annotated length " +
                       std::to_string(truth.series_length));
  }
  truth.validate();
  double total = 0.0;
  for (const auto& [id, cps] : truth.annotators) {
    const auto interior = interior_changepoints(cps, truth.series_length);
    total += covering(predicted,
                      partition_from_changepoints(interior, truth.series_length));
  }
  return total / static_cast<double>(truth.annotators.size());
}

std::size_t count_margin_matches(std::span<const std::size_t> predicted,
                                 std::span<const std::size_t> truth,
                                 std::size_t margin) noexcept {
  // Windows of equal width: serving each true point, in order, with the
  // earliest unused prediction in reach is a maximum matching.
  std::size_t j = 0;
  std::size_t matched = 0;
  for (std::size_t t : truth) {
    while (j < predicted.size() && predicted[j] + margin < t) ++j;
    if (j < predicted.size() && predicted[j] <= t + margin) {
      ++matched;
      ++j;
    }
  }
  return matched;
}

PrecisionRecall precision_recall(std::span<const std::size_t> predicted,
                                 const AnnotationSet& truth, std::size_t margin) {
  require_annotators(truth);
  truth.validate();
  require_strictly_increasing(predicted, "predicted change points");
  if (!predicted.empty() && predicted.back() > truth.series_length) {
    throw InvalidInput("predicted change point " +
                       std::to_string(predicted.back()) + " exceeds series length " +
                       std::to_string(truth.series_length));
  }
  const auto x = with_origin(predicted);

  std::set<std::size_t> merged{0};
  double recall = 0.0;
  for (const auto& [id, cps] : truth.annotators) {
    const auto t = with_origin(cps);
    merged.insert(t.begin(), t.end());
    recall += static_cast<double>(count_margin_matches(x, t, margin)) /
              static_cast<double>(t.size());
  }
  recall /= static_cast<double>(truth.annotators.size());

  const std::vector<std::size_t> all(merged.begin(), merged.end());
  const double precision = static_cast<double>(count_margin_matches(x, all, margin)) /
                           static_cast<double>(x.size());
  return {precision, recall};
}

double f1(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Scores evaluate(std::span<const std::size_t> predicted,
                const AnnotationSet& truth, std::size_t margin) {
  std::vector<std::size_t> sorted(predicted.begin(), predicted.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const auto pr = precision_recall(sorted, truth, margin);
  const auto cover = covering(
      partition_from_changepoints(interior_changepoints(sorted, truth.series_length),
                                  truth.series_length),
      truth);
  return {f1(pr.precision, pr.recall), cover, pr.precision, pr.recall};
}

}  // namespace watch
