#include "watch/data.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "watch/error.hpp"

namespace watch {
namespace {

using nlohmann::json;

enum class Stream : std::uint32_t { mean_shift = 1, clusters = 2, centers = 3 };

// Generator streams are decorrelated from mt19937_64(seed), which the
// projection directions use.
std::mt19937_64 synth_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw LoadError(LoadErrorKind::io, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw LoadError(LoadErrorKind::io, "cannot write " + path.string());
  }
  out << text;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(LoadErrorKind::malformed, std::string("malformed JSON: ") + e.what());
  }
}

std::size_t require_count(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_unsigned()) {
    throw LoadError(LoadErrorKind::malformed,
                    std::string("field '") + key + "' must be a nonnegative integer");
  }
  return j[key].get<std::size_t>();
}

// Resolves NaN cells (missing) in a row-major T x d block.
void resolve_missing(std::vector<double>& values, std::size_t T, std::size_t d,
                     const LoadOptions& opts) {
  for (std::size_t c = 0; c < d; ++c) {
    std::optional<double> last;
    std::optional<std::size_t> first_gap;
    for (std::size_t t = 0; t < T; ++t) {
      double& v = values[t * d + c];
      if (std::isnan(v)) {
        if (!opts.forward_fill) {
          throw LoadError(LoadErrorKind::non_finite,
                          "missing or non-finite value at row " + std::to_string(t) +
                              ", column " + std::to_string(c));
        }
        if (last) {
          v = *last;
        } else if (!first_gap) {
          first_gap = t;
        }
      } else if (!std::isfinite(v)) {
        throw LoadError(LoadErrorKind::non_finite,
                        "infinite value at row " + std::to_string(t) +
                            ", column " + std::to_string(c));
      } else {
        if (!last && first_gap) {
          for (std::size_t k = *first_gap; k < t; ++k) values[k * d + c] = v;
        }
        last = v;
      }
    }
    if (!last) {
      throw LoadError(LoadErrorKind::non_finite,
                      "column " + std::to_string(c) + " has no observed values");
    }
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty() || cell == "nan" || cell == "NaN" || cell == "NA") {
    return kMissing;
  }
  double v = 0.0;
  const char* first = cell.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw LoadError(LoadErrorKind::parse, "non-numeric cell '" + cell + "' at row " +
                                              std::to_string(row) + ", column " +
                                              std::to_string(col));
  }
  if (!std::isfinite(v)) {
    throw LoadError(LoadErrorKind::non_finite,
                    "non-finite cell at row " + std::to_string(row) + ", column " +
                        std::to_string(col));
  }
  return v;
}

}  // namespace

void TimeSeriesDataset::validate() const {
  if (truth) {
    if (truth->series_length != n_obs()) {
      throw InvalidInput("annotations cover " + std::to_string(truth->series_length) +
                         " observations, dataset has " + std::to_string(n_obs()));
    }
    truth->validate();
  }
}

TimeSeriesDataset parse_dataset_json(std::string_view text, LoadOptions opts) {
  const json j = parse_json(text);
  if (!j.is_object()) throw LoadError(LoadErrorKind::malformed, "dataset must be a JSON object");
  if (!j.contains("name") || !j["name"].is_string()) {
    throw LoadError(LoadErrorKind::malformed, "field 'name' must be a string");
  }
  const std::size_t T = require_count(j, "n_obs");
  const std::size_t d = require_count(j, "n_dim");
  if (!j.contains("series") || !j["series"].is_array()) {
    throw LoadError(LoadErrorKind::malformed, "field 'series' must be an array");
  }
  const json& series = j["series"];
  if (T == 0 || d == 0) {
    throw LoadError(LoadErrorKind::shape_mismatch, "n_obs and n_dim must be positive");
  }
  if (series.size() != T) {
    throw LoadError(LoadErrorKind::shape_mismatch,
                    "series has " + std::to_string(series.size()) + " rows, n_obs is " +
                        std::to_string(T));
  }
  std::vector<double> values;
  values.reserve(T * d);
  for (std::size_t t = 0; t < T; ++t) {
    const json& row = series[t];
    if (!row.is_array()) {
      throw LoadError(LoadErrorKind::malformed, "row " + std::to_string(t) + " is not an array");
    }
    if (row.size() != d) {
      throw LoadError(LoadErrorKind::shape_mismatch,
                      "row " + std::to_string(t) + " has " + std::to_string(row.size()) +
                          " values, n_dim is " + std::to_string(d));
    }
    for (const json& cell : row) {
      if (cell.is_null()) {
        values.push_back(kMissing);
      } else if (cell.is_number()) {
        values.push_back(cell.get<double>());
      } else {
        throw LoadError(LoadErrorKind::malformed,
                        "row " + std::to_string(t) + " holds a non-numeric value");
      }
    }
  }
  resolve_missing(values, T, d, opts);
  return {j["name"].get<std::string>(), PointSet(T, d, std::move(values)), std::nullopt, {}};
}

TimeSeriesDataset load_dataset_json(const std::filesystem::path& path,
                                    LoadOptions opts) {
  return parse_dataset_json(read_file(path), opts);
}

std::string dataset_to_json(const TimeSeriesDataset& ds) {
  json series = json::array();
  for (std::size_t t = 0; t < ds.n_obs(); ++t) {
    const auto row = ds.values.row(t);
    series.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  json j;
  j["name"] = ds.name;
  j["n_obs"] = ds.n_obs();
  j["n_dim"] = ds.n_dim();
  j["series"] = std::move(series);
  return j.dump() + "\n";
}

void save_dataset_json(const TimeSeriesDataset& ds, const std::filesystem::path& path) {
  write_file(path, dataset_to_json(ds));
}

LoadedAnnotations parse_annotations_json(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw LoadError(LoadErrorKind::malformed, "annotations must be a JSON object");
  LoadedAnnotations out;
  if (j.contains("dataset")) {
    if (!j["dataset"].is_string()) {
      throw LoadError(LoadErrorKind::malformed, "field 'dataset' must be a string");
    }
    out.dataset = j["dataset"].get<std::string>();
  }
  out.annotations.series_length = require_count(j, "n_obs");
  if (!j.contains("annotations") || !j["annotations"].is_object()) {
    throw LoadError(LoadErrorKind::malformed, "field 'annotations' must be an object");
  }
  for (const auto& [id, list] : j["annotations"].items()) {
    if (!list.is_array()) {
      throw LoadError(LoadErrorKind::malformed, "annotations of '" + id + "' must be an array");
    }
    std::vector<std::size_t> cps;
    for (const json& v : list) {
      if (!v.is_number_unsigned()) {
        throw LoadError(LoadErrorKind::malformed,
                        "annotations of '" + id + "' must be nonnegative integers");
      }
      cps.push_back(v.get<std::size_t>());
    }
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    if (!cps.empty() && cps.back() >= out.annotations.series_length) {
      throw LoadError(LoadErrorKind::shape_mismatch,
                      "annotation " + std::to_string(cps.back()) + " of '" + id +
                          "' is not below n_obs");
    }
    out.annotations.annotators.emplace(id, std::move(cps));
  }
  return out;
}

LoadedAnnotations load_annotations_json(const std::filesystem::path& path) {
  return parse_annotations_json(read_file(path));
}

std::string annotations_to_json(const std::string& dataset, const AnnotationSet& truth) {
  json ann = json::object();
  for (const auto& [id, cps] : truth.annotators) ann[id] = cps;
  json j;
  j["dataset"] = dataset;
  j["n_obs"] = truth.series_length;
  j["annotations"] = std::move(ann);
  return j.dump() + "\n";
}

void save_annotations_json(const std::string& dataset, const AnnotationSet& truth,
                           const std::filesystem::path& path) {
  write_file(path, annotations_to_json(dataset, truth));
}

TimeSeriesDataset parse_dataset_csv(std::string_view text, bool has_header,
                                    std::string name, LoadOptions opts) {
  std::vector<std::string> header;
  std::vector<double> values;
  std::size_t d = 0;
  std::size_t T = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (has_header && header.empty() && T == 0) {
      header = std::move(cells);
      d = header.size();
      continue;
    }
    if (d == 0) d = cells.size();
    if (cells.size() != d) {
      throw LoadError(LoadErrorKind::shape_mismatch,
                      "line " + std::to_string(line_no) + " has " +
                          std::to_string(cells.size()) + " columns, expected " +
                          std::to_string(d));
    }
    for (std::size_t c = 0; c < d; ++c) {
      values.push_back(parse_cell(cells[c], line_no, c + 1));
    }
    ++T;
  }
  if (T == 0) throw LoadError(LoadErrorKind::shape_mismatch, "CSV has no data rows");
  resolve_missing(values, T, d, opts);
  return {std::move(name), PointSet(T, d, std::move(values)), std::nullopt, std::move(header)};
}

TimeSeriesDataset load_dataset_csv(const std::filesystem::path& path, bool has_header,
                                   LoadOptions opts) {
  return parse_dataset_csv(read_file(path), has_header, path.stem().string(), opts);
}

TimeSeriesDataset minmax_normalize(const TimeSeriesDataset& ds, std::size_t fit_prefix) {
  if (fit_prefix < 2) throw InvalidInput("normalization prefix must hold at least 2 samples");
  if (fit_prefix > ds.n_obs()) {
    throw InvalidInput("normalization prefix " + std::to_string(fit_prefix) +
                       " exceeds series length " + std::to_string(ds.n_obs()));
  }
  const std::size_t d = ds.n_dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < fit_prefix; ++t) {
    const auto row = ds.values.row(t);
    for (std::size_t c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], row[c]);
      hi[c] = std::max(hi[c], row[c]);
    }
  }
  std::vector<double> values(ds.values.values().begin(), ds.values.values().end());
  for (std::size_t t = 0; t < ds.n_obs(); ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      double& v = values[t * d + c];
      v = hi[c] > lo[c] ? (v - lo[c]) / (hi[c] - lo[c]) : 0.0;
    }
  }
  TimeSeriesDataset out = ds;
  out.values = PointSet(ds.n_obs(), d, std::move(values));
  return out;
}

void SynthSpec::validate() const {
  if (T == 0 || d == 0) throw InvalidInput("synthetic series needs T >= 1 and d >= 1");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd) || !std::isfinite(shift_magnitude)) {
    throw InvalidInput("noise_sd must be finite and nonnegative; shift must be finite");
  }
  for (std::size_t i = 0; i < change_indices.size(); ++i) {
    const std::size_t cp = change_indices[i];
    if (cp == 0 || cp >= T || (i > 0 && cp <= change_indices[i - 1])) {
      throw InvalidInput("change indices must be strictly increasing within (0, T)");
    }
  }
}

TimeSeriesDataset synth_mean_shift(const SynthSpec& spec, std::string name) {
  spec.validate();
  auto gen = synth_engine(spec.seed, Stream::mean_shift);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> values(spec.T * spec.d);
  std::size_t segment = 0;
  for (std::size_t t = 0; t < spec.T; ++t) {
    while (segment < spec.change_indices.size() && t >= spec.change_indices[segment]) {
      ++segment;
    }
    const double mean = static_cast<double>(segment) * spec.shift_magnitude;
    for (std::size_t c = 0; c < spec.d; ++c) {
      values[t * spec.d + c] = mean + spec.noise_sd * noise(gen);
    }
  }
  AnnotationSet truth{{{"synthetic", spec.change_indices}}, spec.T};
  return {std::move(name), PointSet(spec.T, spec.d, std::move(values)), std::move(truth), {}};
}

TimeSeriesDataset synth_cluster_sequence(const SynthSpec& spec,
                                         const std::vector<std::vector<double>>& centers,
                                         const std::vector<std::size_t>& segment_lengths,
                                         std::string name) {
  if (centers.empty() || centers.size() != segment_lengths.size()) {
    throw InvalidInput("need one center per segment length");
  }
  if (spec.d == 0 || !(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) {
    throw InvalidInput("cluster sequence needs d >= 1 and a finite nonnegative noise_sd");
  }
  std::size_t T = 0;
  std::vector<std::size_t> boundaries;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (segment_lengths[k] == 0) throw InvalidInput("segment lengths must be positive");
    if (centers[k].size() != spec.d) {
      throw InvalidInput("center " + std::to_string(k) + " has dimension " +
                         std::to_string(centers[k].size()) + ", expected " +
                         std::to_string(spec.d));
    }
    if (k > 0) boundaries.push_back(T);
    T += segment_lengths[k];
  }
  auto gen = synth_engine(spec.seed, Stream::clusters);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> values;
  values.reserve(T * spec.d);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    for (std::size_t t = 0; t < segment_lengths[k]; ++t) {
      for (std::size_t c = 0; c < spec.d; ++c) {
        values.push_back(centers[k][c] + spec.noise_sd * noise(gen));
      }
    }
  }
  AnnotationSet truth{{{"synthetic", boundaries}}, T};
  return {std::move(name), PointSet(T, spec.d, std::move(values)), std::move(truth), {}};
}

std::vector<std::vector<double>> random_centers(std::size_t count, std::size_t d,
                                                double scale, std::uint64_t seed) {
  auto gen = synth_engine(seed, Stream::centers);
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<std::vector<double>> centers(count, std::vector<double>(d));
  for (auto& c : centers) {
    for (auto& v : c) v = normal(gen);
  }
  return centers;
}

}  // namespace watch
