#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "watch/data.hpp"
#include "watch/detector.hpp"
#include "watch/ranks.hpp"

namespace watch {

enum class Method { watch, zero };
enum class Mode { default_mode, best };
enum class Target { none, f1, cover };
enum class RunStatus { ok, timeout, failure };

std::string_view method_name(Method m) noexcept;
std::string_view mode_name(Mode m) noexcept;
std::optional<Mode> parse_mode(std::string_view name) noexcept;
std::string_view target_name(Target t) noexcept;
std::string_view status_name(RunStatus s) noexcept;

struct RunSpec {
  const TimeSeriesDataset* dataset = nullptr;
  Method method = Method::watch;
  Mode mode = Mode::default_mode;
  /// One config in default mode; the search grid in best mode.
  std::vector<WatchConfig> grid{WatchConfig{}};
  std::size_t margin = 5;
  double timeout_seconds = 3600.0;
  /// Min-max rescale each dimension using the first kappa samples.
  bool normalize = false;

  /// Throws ConfigInvalid.
  void validate() const;
};

struct RunResult {
  std::string dataset;
  std::size_t n_dim = 0;
  Method method = Method::watch;
  Mode mode = Mode::default_mode;
  Target target = Target::none;        ///< metric the config was selected for
  std::optional<WatchConfig> config;   ///< absent for the zero baseline
  std::vector<ChangePoint> change_points;
  std::optional<double> f1;            ///< present iff status == ok
  std::optional<double> cover;
  double wall_seconds = 0.0;
  RunStatus status = RunStatus::ok;
  std::string message;
};

/// Runs one config (the zero baseline ignores it) and scores it. Never
/// throws for detector failures or timeouts; those become the status.
RunResult evaluate_config(const TimeSeriesDataset& ds, Method method,
                          const WatchConfig& cfg, std::size_t margin,
                          double timeout_seconds, bool normalize);

/// Default-mode run of spec.grid.front(). Throws EvalImpossible when the
/// dataset has no annotations.
RunResult run_default(const RunSpec& spec);

struct BestRun {
  RunResult by_f1;
  RunResult by_cover;
};

/// Oracle selection over grid runs given in grid order: the first run
/// maximizing each metric wins. All runs failed -> both entries have status
/// failure (or timeout when every run timed out).
BestRun select_best(const std::vector<RunResult>& grid_runs);

/// Evaluates every grid config and selects per metric.
BestRun run_best(const RunSpec& spec);

/// The built-in search grid for a series of length T.
std::vector<WatchConfig> default_grid(std::size_t series_length);

struct SummaryRow {
  std::string group;  ///< "<method>:univariate" or "<method>:multivariate"
  Mode mode = Mode::default_mode;
  std::string metric;  ///< "f1" or "cover"
  std::optional<double> mean;
  std::size_t count = 0;
};

/// Means of ok runs per (method, dimensionality group, mode, metric). Best
/// mode rows use the run selected for that metric. Groups with runs but no
/// ok run keep a row with no mean and count 0. Independent of input order.
std::vector<SummaryRow> summarize(const std::vector<RunResult>& results);

struct BenchConfig {
  std::vector<TimeSeriesDataset> datasets;
  Mode mode = Mode::default_mode;
  WatchConfig default_config{};
  /// Best-mode grid; empty means default_grid(T) per dataset.
  std::vector<WatchConfig> grid;
  std::size_t margin = 5;
  double timeout_seconds = 3600.0;
  bool normalize = false;
  std::size_t threads = 1;
};

struct RankReport {
  std::string metric;
  std::vector<std::string> methods;
  std::vector<double> mean_ranks;   ///< empty when no dataset was rankable
  std::size_t datasets = 0;
  std::vector<PairwiseComparison> pairs;
  std::optional<FriedmanResult> friedman;
};

struct BenchOutput {
  std::vector<RunResult> results;  ///< canonical order
  std::vector<SummaryRow> summary;
  std::vector<RankReport> ranks;   ///< f1 then cover
};

/// Runs every dataset with WATCH and the zero baseline. Default mode runs
/// the default config; best mode also searches the grid. Tasks run on up to
/// `threads` workers; results do not depend on the thread count.
BenchOutput run_benchmark(const BenchConfig& cfg);

/// Dataset files (*.json, excluding *.annotations.json) from a directory,
/// sorted by file name, each paired with <stem>.annotations.json. Throws
/// LoadError when the directory is unreadable or holds no dataset.
std::vector<TimeSeriesDataset> load_dataset_dir(const std::filesystem::path& dir,
                                                LoadOptions opts = {});

nlohmann::json to_json(const RunResult& r);
std::string results_to_json(const std::vector<RunResult>& results);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::string ranks_to_csv(const RankReport& report);
std::string pairwise_to_csv(const RankReport& report);

/// results.json, summary.csv, ranks_<metric>.csv, pairwise_<metric>.csv and
/// ranks_meta.json. No wall-clock values are written, so reruns are
/// byte-identical.
void write_bench_outputs(const BenchOutput& out, const std::filesystem::path& dir);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace watch
