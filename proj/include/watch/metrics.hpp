#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace watch {

/// Change point annotations for one series, keyed by annotator id.
struct AnnotationSet {
  std::map<std::string, std::vector<std::size_t>> annotators;
  std::size_t series_length = 0;

  /// Every list strictly increasing with indices in [0, T). Throws InvalidInput.
  void validate() const;

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

/// Half-open index interval [begin, end).
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Contiguous, disjoint, nonempty segments covering [0, T).
class Partition {
 public:
  explicit Partition(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::size_t length() const noexcept { return segments_.back().end; }

 private:
  std::vector<Segment> segments_;
};

/// Cuts [0, T) at each change point. cps must be strictly increasing and
/// lie in (0, T); throws InvalidInput otherwise.
Partition partition_from_changepoints(std::span<const std::size_t> cps,
                                      std::size_t series_length);

/// Sorted, deduplicated points of cps lying strictly inside (0, T). Detector
/// output may contain T itself, which does not cut the series.
std::vector<std::size_t> interior_changepoints(std::span<const std::size_t> cps,
                                               std::size_t series_length);

/// Intersection over union of two index intervals.
double jaccard(Segment a, Segment b);

/// Segment-weighted best-Jaccard covering of the truth partition by the
/// prediction. Throws InvalidInput on a length mismatch.
double covering(const Partition& predicted, const Partition& truth);

/// Covering averaged over annotators.
double covering(const Partition& predicted, const AnnotationSet& truth);

/// Size of a maximum one-to-one matching between two sorted index lists,
/// pairing points at most `margin` apart.
std::size_t count_margin_matches(std::span<const std::size_t> predicted,
                                 std::span<const std::size_t> truth,
                                 std::size_t margin) noexcept;

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Margin-tolerant precision and recall against several annotators. Index 0
/// is added to the prediction and to every annotator before matching.
/// Precision matches the prediction against the union of all annotations,
/// so a point is a false positive only if no annotator supports it; recall
/// averages the per-annotator matched fractions.
PrecisionRecall precision_recall(std::span<const std::size_t> predicted,
                                 const AnnotationSet& truth, std::size_t margin);

/// Harmonic mean; 0 when both inputs are 0.
double f1(double precision, double recall);

struct Scores {
  double f1 = 0.0;
  double cover = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// F1 and covering for raw detector output (indices may include T).
Scores evaluate(std::span<const std::size_t> predicted,
                const AnnotationSet& truth, std::size_t margin);

}  // namespace watch
