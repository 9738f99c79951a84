#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "watch/bench.hpp"
#include "watch/config_io.hpp"
#include "watch/data.hpp"
#include "watch/detector.hpp"
#include "watch/error.hpp"
#include "watch/metrics.hpp"

namespace watch::cli {
namespace {

using nlohmann::json;

struct DetectorFlags {
  std::size_t omega = 20;
  std::optional<std::size_t> kappa;  // default 3 * omega
  std::optional<std::size_t> mu;     // default 30 * omega
  double epsilon = 1.5;
  double p = 2.0;
  std::size_t slices = 128;
  std::uint64_t seed = 42;
  std::string eviction = "stop_adding";
  bool normalize = false;

  void attach(CLI::App& app) {
    app.add_option("--omega", omega, "Mini-batch size")->capture_default_str();
    app.add_option("--kappa", kappa, "Points needed before detection starts (default 3*omega)");
    app.add_option("--mu", mu, "Buffer capacity in points (default 30*omega)");
    app.add_option("--epsilon", epsilon, "Threshold ratio")->capture_default_str();
    app.add_option("--p", p, "Wasserstein order")->capture_default_str();
    app.add_option("--slices", slices, "Random projection count")->capture_default_str();
    app.add_option("--seed", seed, "Projection seed")->capture_default_str();
    app.add_option("--eviction", eviction, "stop_adding or fifo")->capture_default_str();
    app.add_flag("--normalize", normalize, "Min-max rescale using the first kappa samples");
  }

  WatchConfig config() const {
    WatchConfig cfg;
    cfg.omega = omega;
    cfg.kappa = kappa.value_or(3 * omega);
    cfg.mu = mu.value_or(30 * omega);
    cfg.epsilon = epsilon;
    cfg.distance.p = p;
    cfg.distance.n_projections = slices;
    cfg.distance.seed = seed;
    const auto e = parse_eviction(eviction);
    if (!e) throw ConfigInvalid("eviction must be stop_adding or fifo");
    cfg.eviction = *e;
    cfg.validate();
    return cfg;
  }
};

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw LoadError(LoadErrorKind::io, "cannot write " + path);
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadErrorKind::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TimeSeriesDataset load_any(const std::string& path, bool csv_header, LoadOptions opts) {
  const std::filesystem::path p(path);
  if (p.extension() == ".csv") return load_dataset_csv(p, csv_header, opts);
  return load_dataset_json(p, opts);
}

std::size_t threads_from_env() {
  if (const char* env = std::getenv("WATCH_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Prediction file: detect output, i.e. {"n_obs": T, "changepoints": [...]}
// with entries either objects carrying "index" or plain integers.
std::pair<std::size_t, std::vector<std::size_t>> load_prediction(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw LoadError(LoadErrorKind::malformed, std::string("malformed prediction JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n_obs") || !j["n_obs"].is_number_unsigned() ||
      !j.contains("changepoints") || !j["changepoints"].is_array()) {
    throw LoadError(LoadErrorKind::malformed,
                    "prediction needs an integer 'n_obs' and a 'changepoints' list");
  }
  std::vector<std::size_t> cps;
  for (const auto& cp : j["changepoints"]) {
    const json& idx = cp.is_object() && cp.contains("index") ? cp["index"] : cp;
    if (!idx.is_number_unsigned()) {
      throw LoadError(LoadErrorKind::malformed, "change point indices must be nonnegative integers");
    }
    cps.push_back(idx.get<std::size_t>());
  }
  return {j["n_obs"].get<std::size_t>(), std::move(cps)};
}

int cmd_detect(const std::string& input, const std::string& output, bool csv_header,
               bool forward_fill, std::optional<double> timeout, const DetectorFlags& flags,
               std::ostream& out) {
  const WatchConfig cfg = flags.config();
  if (timeout && !(*timeout > 0.0)) throw ConfigInvalid("--timeout must be positive");
  TimeSeriesDataset ds = load_any(input, csv_header, {forward_fill});
  if (flags.normalize) {
    ds = minmax_normalize(ds, std::clamp<std::size_t>(cfg.kappa, 2, ds.n_obs()));
  }
  std::optional<Deadline> deadline;
  if (timeout) {
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(*timeout));
  }
  const auto cps = process_series(ds.values, cfg, deadline);
  if (deadline && std::chrono::steady_clock::now() > *deadline) {
    throw Timeout("detection exceeded --timeout");
  }
  json list = json::array();
  for (const auto& cp : cps) list.push_back(to_json(cp));
  json j{{"dataset", ds.name},
         {"n_obs", ds.n_obs()},
         {"config", to_json(cfg)},
         {"changepoints", std::move(list)}};
  j["config"]["normalize"] = flags.normalize;
  write_output(output, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path, std::size_t margin,
             const std::string& output, std::ostream& out) {
  const auto [n_obs, cps] = load_prediction(pred_path);
  const auto truth = load_annotations_json(truth_path);
  if (n_obs != truth.annotations.series_length) {
    throw InvalidInput("prediction covers " + std::to_string(n_obs) +
                       " observations, annotations cover " +
                       std::to_string(truth.annotations.series_length));
  }
  const Scores s = evaluate(cps, truth.annotations, margin);
  json j{{"f1", s.f1}, {"cover", s.cover}, {"precision", s.precision}, {"recall", s.recall}};
  write_output(output, j.dump(2) + "\n", out);
  return kOk;
}

struct SynthFlags {
  std::string kind = "mean_shift";
  std::size_t T = 400;
  std::size_t d = 1;
  std::vector<std::size_t> cps;
  double shift = 5.0;
  double sd = 1.0;
  std::uint64_t seed = 42;
  std::vector<std::size_t> lengths;
  double center_scale = 3.0;
  std::string name;
  std::string out_dir = ".";
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  SynthSpec spec;
  spec.T = f.T;
  spec.d = f.d;
  spec.change_indices = f.cps;
  spec.shift_magnitude = f.shift;
  spec.noise_sd = f.sd;
  spec.seed = f.seed;
  TimeSeriesDataset ds = [&] {
    try {
      if (f.kind == "mean_shift") {
        return synth_mean_shift(spec, f.name.empty() ? "synthetic" : f.name);
      }
      if (f.kind == "clusters") {
        if (f.lengths.empty()) throw InvalidInput("--lengths is required for clusters");
        const auto centers = random_centers(f.lengths.size(), f.d, f.center_scale, f.seed ^ 0x9e3779b97f4a7c15ULL);
        return synth_cluster_sequence(spec, centers, f.lengths, f.name.empty() ? "clusters" : f.name);
      }
      throw InvalidInput("--kind must be mean_shift or clusters");
    } catch (const InvalidInput& e) {
      throw ConfigInvalid(e.what());
    }
  }();
  const std::filesystem::path dir(f.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto data_path = dir / (ds.name + ".json");
  const auto ann_path = dir / (ds.name + ".annotations.json");
  save_dataset_json(ds, data_path);
  save_annotations_json(ds.name, *ds.truth, ann_path);
  out << data_path.string() << "\n" << ann_path.string() << "\n";
  return kOk;
}

int cmd_bench(const std::string& datasets_dir, const std::string& mode_str,
              const std::string& grid_path, const std::string& out_dir, double timeout,
              std::size_t margin, bool forward_fill, const DetectorFlags& flags,
              std::ostream& out) {
  BenchConfig cfg;
  const auto mode = parse_mode(mode_str);
  if (!mode) throw ConfigInvalid("--mode must be default or best");
  if (!(timeout > 0.0)) throw ConfigInvalid("--timeout must be positive");
  cfg.mode = *mode;
  cfg.default_config = flags.config();
  cfg.normalize = flags.normalize;
  cfg.timeout_seconds = timeout;
  cfg.margin = margin;
  cfg.threads = threads_from_env();
  if (!grid_path.empty()) {
    std::ifstream probe(grid_path);
    if (!probe) throw LoadError(LoadErrorKind::io, "cannot open grid file " + grid_path);
    cfg.grid = load_grid(grid_path);
  }
  cfg.datasets = load_dataset_dir(datasets_dir, {forward_fill});
  const BenchOutput result = run_benchmark(cfg);
  write_bench_outputs(result, out_dir);
  out << summary_to_csv(result.summary);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wasserstein change point detection"};
  app.require_subcommand(1);

  auto* detect = app.add_subcommand("detect", "Detect change points in a dataset");
  std::string input, output;
  bool csv_header = false;
  bool forward_fill = false;
  std::optional<double> timeout;
  DetectorFlags detect_flags;
  detect->add_option("--input", input, "Dataset JSON or CSV")->required();
  detect->add_option("--output", output, "Result path (default stdout)");
  detect->add_flag("--csv-header", csv_header, "CSV input has a header row");
  detect->add_flag("--forward-fill", forward_fill, "Fill missing values from the previous step");
  detect->add_option("--timeout", timeout, "Wall-clock limit in seconds");
  detect_flags.attach(*detect);

  auto* eval = app.add_subcommand("eval", "Score a prediction against annotations");
  std::string pred, truth, eval_output;
  std::size_t margin = 5;
  eval->add_option("--pred", pred, "Detection result JSON")->required();
  eval->add_option("--truth", truth, "Annotation JSON")->required();
  eval->add_option("--margin", margin, "Matching margin")->capture_default_str();
  eval->add_option("--output", eval_output, "Metric path (default stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  SynthFlags sf;
  synth->add_option("--kind", sf.kind, "mean_shift or clusters")->capture_default_str();
  synth->add_option("--T", sf.T, "Series length")->capture_default_str();
  synth->add_option("--d", sf.d, "Dimension")->capture_default_str();
  synth->add_option("--cps", sf.cps, "Change indices")->delimiter(',');
  synth->add_option("--shift", sf.shift, "Mean shift per segment")->capture_default_str();
  synth->add_option("--sd", sf.sd, "Noise standard deviation")->capture_default_str();
  synth->add_option("--seed", sf.seed, "Generator seed")->capture_default_str();
  synth->add_option("--lengths", sf.lengths, "Segment lengths (clusters)")->delimiter(',');
  synth->add_option("--center-scale", sf.center_scale, "Center spread (clusters)")->capture_default_str();
  synth->add_option("--name", sf.name, "Dataset name");
  synth->add_option("--out", sf.out_dir, "Output directory")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Run the default or best-mode benchmark");
  std::string datasets_dir, mode = "default", grid_path, bench_out = "bench_out";
  double bench_timeout = 3600.0;
  std::size_t bench_margin = 5;
  bool bench_ffill = false;
  DetectorFlags bench_flags;
  bench->add_option("--datasets", datasets_dir, "Directory of dataset/annotation JSON")->required();
  bench->add_option("--mode", mode, "default or best")->capture_default_str();
  bench->add_option("--grid", grid_path, "Grid JSON (best mode; built-in grid otherwise)");
  bench->add_option("--out", bench_out, "Output directory")->capture_default_str();
  bench->add_option("--timeout", bench_timeout, "Per-run limit in seconds")->capture_default_str();
  bench->add_option("--margin", bench_margin, "F1 matching margin")->capture_default_str();
  bench->add_flag("--forward-fill", bench_ffill, "Fill missing values from the previous step");
  bench_flags.attach(*bench);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "error: " << e.what() << "\n" << sub->help();
    return kConfigError;
  }

  try {
    if (detect->parsed()) {
      return cmd_detect(input, output, csv_header, forward_fill, timeout, detect_flags, out);
    }
    if (eval->parsed()) return cmd_eval(pred, truth, margin, eval_output, out);
    if (synth->parsed()) return cmd_synth(sf, out);
    if (bench->parsed()) {
      return cmd_bench(datasets_dir, mode, grid_path, bench_out, bench_timeout, bench_margin,
                       bench_ffill, bench_flags, out);
    }
  } catch (const ConfigInvalid& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Timeout& e) {
    err << "timeout: " << e.what() << "\n";
    return kTimeout;
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  }
  return kConfigError;
}

}  // namespace watch::cli
