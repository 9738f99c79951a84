#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "watch/metrics.hpp"
#include "watch/point_set.hpp"

namespace watch {

/// A T x d series in time order with optional annotations.
struct TimeSeriesDataset {
  std::string name;
  PointSet values;
  std::optional<AnnotationSet> truth;
  std::vector<std::string> column_names;  ///< from a CSV header, else empty

  std::size_t n_obs() const noexcept { return values.size(); }
  std::size_t n_dim() const noexcept { return values.dim(); }

  /// Truth length matches n_obs and truth itself is valid.
  void validate() const;
};

struct LoadOptions {
  /// Fill missing cells (JSON null, empty or "nan" CSV cells) from the
  /// previous time step; leading gaps take the first observed value.
  /// Without it missing cells are rejected.
  bool forward_fill = false;
};

// Dataset JSON:    {"name": str, "n_obs": int, "n_dim": int,
//                   "series": [[f64, ...n_dim], ...n_obs]}
// Annotation JSON: {"dataset": str, "n_obs": int,
//                   "annotations": {"<annotator>": [int, ...]}}
// All loaders throw LoadError with a kind describing the failure.

TimeSeriesDataset parse_dataset_json(std::string_view text, LoadOptions opts = {});
TimeSeriesDataset load_dataset_json(const std::filesystem::path& path,
                                    LoadOptions opts = {});
std::string dataset_to_json(const TimeSeriesDataset& ds);
void save_dataset_json(const TimeSeriesDataset& ds,
                       const std::filesystem::path& path);

struct LoadedAnnotations {
  std::string dataset;
  AnnotationSet annotations;
};

LoadedAnnotations parse_annotations_json(std::string_view text);
LoadedAnnotations load_annotations_json(const std::filesystem::path& path);
std::string annotations_to_json(const std::string& dataset,
                                const AnnotationSet& truth);
void save_annotations_json(const std::string& dataset, const AnnotationSet& truth,
                           const std::filesystem::path& path);

/// Numeric comma-separated values, one time step per line, one column per
/// dimension. The dataset is named after the file stem.
TimeSeriesDataset load_dataset_csv(const std::filesystem::path& path,
                                   bool has_header, LoadOptions opts = {});
TimeSeriesDataset parse_dataset_csv(std::string_view text, bool has_header,
                                    std::string name, LoadOptions opts = {});

/// Maps each dimension affinely so its first fit_prefix samples span [0, 1].
/// Dimensions constant over the prefix map to 0. Throws InvalidInput when
/// fit_prefix < 2 or fit_prefix > T.
TimeSeriesDataset minmax_normalize(const TimeSeriesDataset& ds,
                                   std::size_t fit_prefix);

struct SynthSpec {
  std::size_t T = 400;
  std::size_t d = 1;
  std::vector<std::size_t> change_indices;
  double shift_magnitude = 5.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 42;

  /// Throws InvalidInput.
  void validate() const;
};

/// Gaussian noise around a per-segment mean; segment k has mean
/// k * shift_magnitude on every dimension. Truth holds one annotator,
/// "synthetic", with the change indices.
TimeSeriesDataset synth_mean_shift(const SynthSpec& spec,
                                   std::string name = "synthetic");

/// Segments of noisy samples around the given centers, in order. Uses d,
/// noise_sd and seed from spec; T and the truth come from segment_lengths.
TimeSeriesDataset synth_cluster_sequence(
    const SynthSpec& spec, const std::vector<std::vector<double>>& centers,
    const std::vector<std::size_t>& segment_lengths,
    std::string name = "clusters");

/// count centers with coordinates drawn from N(0, scale^2).
std::vector<std::vector<double>> random_centers(std::size_t count, std::size_t d,
                                                double scale, std::uint64_t seed);

}  // namespace watch
