#include "watch/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <thread>
#include <tuple>

#include "watch/config_io.hpp"
#include "watch/error.hpp"
#include "watch/metrics.hpp"
#include "watch/ranks.hpp"

namespace watch {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kPosthocNote =
    "Friedman mean ranks; pairwise two-sided z-test on mean rank difference, "
    "se = sqrt(k(k+1)/(6N)); Holm step-down adjustment across all pairs";

std::vector<std::size_t> indices_of(const std::vector<ChangePoint>& cps) {
  std::vector<std::size_t> out;
  out.reserve(cps.size());
  for (const auto& cp : cps) out.push_back(cp.index);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError(LoadErrorKind::io, "cannot write " + path.string());
  out << text;
}

std::string dim_group(std::size_t d) { return d > 1 ? "multivariate" : "univariate"; }

}  // namespace

std::string_view method_name(Method m) noexcept { return m == Method::zero ? "zero" : "watch"; }

std::string_view mode_name(Mode m) noexcept { return m == Mode::best ? "best" : "default"; }

std::optional<Mode> parse_mode(std::string_view name) noexcept {
  if (name == "default") return Mode::default_mode;
  if (name == "best") return Mode::best;
  return std::nullopt;
}

std::string_view target_name(Target t) noexcept {
  switch (t) {
    case Target::f1:
      return "f1";
    case Target::cover:
      return "cover";
    case Target::none:
      break;
  }
  return "none";
}

std::string_view status_name(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::timeout:
      return "timeout";
    case RunStatus::failure:
      return "failure";
    case RunStatus::ok:
      break;
  }
  return "ok";
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void RunSpec::validate() const {
  if (dataset == nullptr) throw ConfigInvalid("run has no dataset");
  if (grid.empty()) throw ConfigInvalid("run grid is empty");
  if (mode == Mode::default_mode && grid.size() != 1) {
    throw ConfigInvalid("default mode takes exactly one config");
  }
  if (!(timeout_seconds > 0.0)) throw ConfigInvalid("timeout must be positive");
}

RunResult evaluate_config(const TimeSeriesDataset& ds, Method method,
                          const WatchConfig& cfg, std::size_t margin,
                          double timeout_seconds, bool normalize) {
  if (!ds.truth) {
    throw EvalImpossible("dataset '" + ds.name + "' has no annotations to score against");
  }
  RunResult r;
  r.dataset = ds.name;
  r.n_dim = ds.n_dim();
  r.method = method;
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(timeout_seconds));
  try {
    if (method == Method::watch) {
      r.config = cfg;
      std::optional<TimeSeriesDataset> scaled;
      if (normalize && std::min(cfg.kappa, ds.n_obs()) >= 2) {
        scaled = minmax_normalize(ds, std::min(cfg.kappa, ds.n_obs()));
      }
      r.change_points = process_series(scaled ? scaled->values : ds.values, cfg, deadline);
      if (Clock::now() > deadline) throw Timeout("run exceeded its time budget");
    }
    const Scores s = evaluate(indices_of(r.change_points), *ds.truth, margin);
    r.f1 = s.f1;
    r.cover = s.cover;
    r.status = RunStatus::ok;
  } catch (const Timeout& e) {
    r.status = RunStatus::timeout;
    r.change_points.clear();
    r.message = e.what();
  } catch (const Error& e) {
    r.status = RunStatus::failure;
    r.change_points.clear();
    r.message = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

RunResult run_default(const RunSpec& spec) {
  spec.validate();
  if (spec.mode != Mode::default_mode) throw ConfigInvalid("run_default needs default mode");
  return evaluate_config(*spec.dataset, spec.method, spec.grid.front(), spec.margin,
                         spec.timeout_seconds, spec.normalize);
}

BestRun select_best(const std::vector<RunResult>& grid_runs) {
  if (grid_runs.empty()) throw InvalidInput("no grid runs to select from");
  auto pick = [&](Target target) {
    const RunResult* best = nullptr;
    for (const auto& r : grid_runs) {
      if (r.status != RunStatus::ok) continue;
      const double v = target == Target::f1 ? *r.f1 : *r.cover;
      const double cur = best ? (target == Target::f1 ? *best->f1 : *best->cover) : 0.0;
      if (!best || v > cur) best = &r;
    }
    RunResult out;
    if (best) {
      out = *best;
    } else {
      const bool all_timeout = std::all_of(grid_runs.begin(), grid_runs.end(), [](const auto& r) {
        return r.status == RunStatus::timeout;
      });
      out.dataset = grid_runs.front().dataset;
      out.n_dim = grid_runs.front().n_dim;
      out.method = grid_runs.front().method;
      out.status = all_timeout ? RunStatus::timeout : RunStatus::failure;
      out.message = "no grid configuration completed";
      for (const auto& r : grid_runs) out.wall_seconds += r.wall_seconds;
    }
    out.mode = Mode::best;
    out.target = target;
    return out;
  };
  return {pick(Target::f1), pick(Target::cover)};
}

BestRun run_best(const RunSpec& spec) {
  spec.validate();
  if (spec.mode != Mode::best) throw ConfigInvalid("run_best needs best mode");
  if (!spec.dataset->truth) {
    throw EvalImpossible("dataset '" + spec.dataset->name + "' has no annotations");
  }
  std::vector<RunResult> runs;
  runs.reserve(spec.grid.size());
  for (const auto& cfg : spec.grid) {
    runs.push_back(evaluate_config(*spec.dataset, spec.method, cfg, spec.margin,
                                   spec.timeout_seconds, spec.normalize));
  }
  return select_best(runs);
}

std::vector<WatchConfig> default_grid(std::size_t series_length) {
  std::vector<WatchConfig> grid;
  for (double eps : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    for (std::size_t omega : {5u, 10u, 20u}) {
      for (std::size_t kappa_mult : {2u, 4u, 6u}) {
        std::vector<std::size_t> mus{10 * omega, 20 * omega, series_length};
        std::sort(mus.begin(), mus.end());
        mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
        for (std::size_t mu : mus) {
          WatchConfig cfg;
          cfg.epsilon = eps;
          cfg.omega = omega;
          cfg.kappa = kappa_mult * omega;
          cfg.mu = mu;
          try {
            cfg.validate();
          } catch (const ConfigInvalid&) {
            continue;
          }
          grid.push_back(cfg);
        }
      }
    }
  }
  return grid;
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& results) {
  using Key = std::tuple<std::string, std::string, std::string>;  // group, mode, metric
  std::map<Key, std::vector<double>> values;
  for (const auto& r : results) {
    const std::string group = std::string(method_name(r.method)) + ":" + dim_group(r.n_dim);
    for (const char* metric : {"f1", "cover"}) {
      if (r.mode == Mode::best && target_name(r.target) != metric) continue;
      auto& slot = values[{group, std::string(mode_name(r.mode)), metric}];
      if (r.status == RunStatus::ok) {
        slot.push_back(std::string_view(metric) == "f1" ? *r.f1 : *r.cover);
      }
    }
  }
  std::vector<SummaryRow> rows;
  for (auto& [key, v] : values) {
    SummaryRow row;
    row.group = std::get<0>(key);
    row.mode = std::get<1>(key) == "best" ? Mode::best : Mode::default_mode;
    row.metric = std::get<2>(key);
    row.count = v.size();
    if (!v.empty()) {
      // Sorted summation keeps the mean independent of input order.
      std::sort(v.begin(), v.end());
      double total = 0.0;
      for (double x : v) total += x;
      row.mean = total / static_cast<double>(v.size());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

struct Task {
  std::size_t dataset;
  Method method;
  WatchConfig config;
};

std::vector<RunResult> run_tasks(const BenchConfig& cfg, const std::vector<Task>& tasks) {
  std::vector<RunResult> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      out[i] = evaluate_config(cfg.datasets[t.dataset], t.method, t.config, cfg.margin,
                               cfg.timeout_seconds, cfg.normalize);
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(cfg.threads, 1, std::max<std::size_t>(1, tasks.size()));
  std::vector<std::jthread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  return out;
}

RankReport rank_report(const BenchConfig& cfg, const std::vector<RunResult>& results,
                       Target metric) {
  RankReport report;
  report.metric = std::string(target_name(metric));
  const std::vector<Method> methods{Method::watch, Method::zero};
  for (Method m : methods) report.methods.emplace_back(method_name(m));
  const Target wanted = cfg.mode == Mode::best ? metric : Target::none;

  ScoreTable table;
  for (const auto& ds : cfg.datasets) {
    std::vector<std::optional<double>> row;
    for (Method m : methods) {
      std::optional<double> score;
      for (const auto& r : results) {
        if (r.dataset == ds.name && r.method == m && r.mode == cfg.mode &&
            r.target == wanted && r.status == RunStatus::ok) {
          score = metric == Target::f1 ? r.f1 : r.cover;
        }
      }
      row.push_back(score);
    }
    if (std::count_if(row.begin(), row.end(), [](const auto& v) { return v.has_value(); }) >= 2) {
      table.push_back(std::move(row));
    }
  }
  report.datasets = table.size();
  if (!table.empty()) {
    report.mean_ranks = average_ranks(table);
    report.friedman = friedman_test(report.mean_ranks, table.size());
    report.pairs = rank_posthoc(report.mean_ranks, table.size());
  }
  return report;
}

}  // namespace

BenchOutput run_benchmark(const BenchConfig& cfg) {
  if (cfg.datasets.empty()) throw InvalidInput("benchmark has no datasets");
  cfg.default_config.validate();
  for (const auto& g : cfg.grid) g.validate();
  if (!(cfg.timeout_seconds > 0.0)) throw ConfigInvalid("timeout must be positive");
  for (const auto& ds : cfg.datasets) {
    if (!ds.truth) throw EvalImpossible("dataset '" + ds.name + "' has no annotations");
  }

  // Per dataset: zero baseline, default config, then the grid (best mode).
  std::vector<Task> tasks;
  std::vector<std::pair<std::size_t, std::size_t>> grid_span(cfg.datasets.size());
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    tasks.push_back({d, Method::zero, cfg.default_config});
    tasks.push_back({d, Method::watch, cfg.default_config});
    const std::size_t first = tasks.size();
    if (cfg.mode == Mode::best) {
      const auto grid = cfg.grid.empty() ? default_grid(cfg.datasets[d].n_obs()) : cfg.grid;
      for (const auto& g : grid) tasks.push_back({d, Method::watch, g});
    }
    grid_span[d] = {first, tasks.size()};
  }
  const auto runs = run_tasks(cfg, tasks);

  BenchOutput out;
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    const RunResult& zero = runs[grid_span[d].first - 2];
    const RunResult& watch_default = runs[grid_span[d].first - 1];
    out.results.push_back(watch_default);
    if (cfg.mode == Mode::best) {
      const std::vector<RunResult> grid_runs(runs.begin() + static_cast<std::ptrdiff_t>(grid_span[d].first),
                                             runs.begin() + static_cast<std::ptrdiff_t>(grid_span[d].second));
      auto best = grid_runs.empty() ? select_best({watch_default}) : select_best(grid_runs);
      out.results.push_back(std::move(best.by_f1));
      out.results.push_back(std::move(best.by_cover));
    }
    out.results.push_back(zero);
    if (cfg.mode == Mode::best) {
      auto best = select_best({zero});
      out.results.push_back(std::move(best.by_f1));
      out.results.push_back(std::move(best.by_cover));
    }
  }
  std::stable_sort(out.results.begin(), out.results.end(),
                   [](const RunResult& a, const RunResult& b) { return a.dataset < b.dataset; });
  out.summary = summarize(out.results);
  out.ranks.push_back(rank_report(cfg, out.results, Target::f1));
  out.ranks.push_back(rank_report(cfg, out.results, Target::cover));
  return out;
}

std::vector<TimeSeriesDataset> load_dataset_dir(const std::filesystem::path& dir,
                                                LoadOptions opts) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw LoadError(LoadErrorKind::io, dir.string() + " is not a readable directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (name.ends_with(".annotations.json")) continue;
    files.push_back(entry.path());
  }
  if (files.empty()) {
    throw LoadError(LoadErrorKind::io, "no dataset files in " + dir.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<TimeSeriesDataset> out;
  for (const auto& f : files) {
    auto ds = load_dataset_json(f, opts);
    const auto ann_path = f.parent_path() / (f.stem().string() + ".annotations.json");
    if (!fs::exists(ann_path)) {
      throw LoadError(LoadErrorKind::io, "missing annotations " + ann_path.string());
    }
    auto ann = load_annotations_json(ann_path);
    if (ann.annotations.series_length != ds.n_obs()) {
      throw LoadError(LoadErrorKind::shape_mismatch,
                      "annotations of " + f.filename().string() + " cover " +
                          std::to_string(ann.annotations.series_length) +
                          " observations, dataset has " + std::to_string(ds.n_obs()));
    }
    ds.truth = std::move(ann.annotations);
    out.push_back(std::move(ds));
  }
  return out;
}

json to_json(const RunResult& r) {
  json cps = json::array();
  for (const auto& cp : r.change_points) cps.push_back(to_json(cp));
  json j{
      {"dataset", r.dataset},
      {"method", std::string(method_name(r.method))},
      {"mode", std::string(mode_name(r.mode))},
      {"target", std::string(target_name(r.target))},
      {"status", std::string(status_name(r.status))},
      {"config", r.config ? to_json(*r.config) : json(nullptr)},
      {"changepoints", std::move(cps)},
      {"f1", r.f1 ? json(*r.f1) : json(nullptr)},
      {"cover", r.cover ? json(*r.cover) : json(nullptr)},
  };
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

std::string results_to_json(const std::vector<RunResult>& results) {
  json j = json::array();
  for (const auto& r : results) j.push_back(to_json(r));
  return j.dump(2) + "\n";
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "group,mode,metric,mean,count\n";
  for (const auto& r : rows) {
    out += r.group + "," + std::string(mode_name(r.mode)) + "," + r.metric + "," +
           (r.mean ? format_double(*r.mean) : std::string()) + "," +
           std::to_string(r.count) + "\n";
  }
  return out;
}

std::string ranks_to_csv(const RankReport& report) {
  std::string out = "method,mean_rank\n";
  for (std::size_t i = 0; i < report.mean_ranks.size(); ++i) {
    out += report.methods[i] + "," + format_double(report.mean_ranks[i]) + "\n";
  }
  return out;
}

std::string pairwise_to_csv(const RankReport& report) {
  std::string out = "method_a,method_b,p_raw,p_holm\n";
  for (const auto& p : report.pairs) {
    out += report.methods[p.a] + "," + report.methods[p.b] + "," + format_double(p.p_raw) +
           "," + format_double(p.p_holm) + "\n";
  }
  return out;
}

void write_bench_outputs(const BenchOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "results.json", results_to_json(out.results));
  write_text(dir / "summary.csv", summary_to_csv(out.summary));
  json meta{{"posthoc", kPosthocNote}, {"metrics", json::object()}};
  for (const auto& report : out.ranks) {
    write_text(dir / ("ranks_" + report.metric + ".csv"), ranks_to_csv(report));
    write_text(dir / ("pairwise_" + report.metric + ".csv"), pairwise_to_csv(report));
    json m{{"datasets", report.datasets}, {"methods", report.methods}};
    if (report.friedman) {
      m["friedman_chi_square"] = report.friedman->chi_square;
      m["friedman_p"] = report.friedman->p_value;
      m["iman_davenport"] = report.friedman->iman_davenport;
    }
    meta["metrics"][report.metric] = std::move(m);
  }
  write_text(dir / "ranks_meta.json", meta.dump(2) + "\n");
}

}  // namespace watch
