#include "watch/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "watch/error.hpp"

namespace watch {

using nlohmann::json;

json to_json(const WatchConfig& cfg) {
  return {
      {"kappa", cfg.kappa},
      {"mu", cfg.mu},
      {"epsilon", cfg.epsilon},
      {"omega", cfg.omega},
      {"p", cfg.distance.p},
      {"slices", cfg.distance.n_projections},
      {"seed", cfg.distance.seed},
      {"eviction", std::string(eviction_name(cfg.eviction))},
  };
}

WatchConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigInvalid("config must be a JSON object");
  static const std::set<std::string> known{"kappa", "mu",     "epsilon", "omega",
                                           "p",     "slices", "seed",    "eviction"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigInvalid("unknown config field '" + key + "'");
  }
  auto count = [&](const char* key, std::size_t fallback) -> std::size_t {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned()) {
      throw ConfigInvalid(std::string("config field '") + key +
                          "' must be a nonnegative integer");
    }
    return j[key].get<std::size_t>();
  };
  auto real = [&](const char* key, double fallback) -> double {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) {
      throw ConfigInvalid(std::string("config field '") + key + "' must be a number");
    }
    return j[key].get<double>();
  };

  WatchConfig cfg;
  cfg.kappa = count("kappa", cfg.kappa);
  cfg.mu = count("mu", cfg.mu);
  cfg.epsilon = real("epsilon", cfg.epsilon);
  cfg.omega = count("omega", cfg.omega);
  cfg.distance.p = real("p", cfg.distance.p);
  cfg.distance.n_projections = count("slices", cfg.distance.n_projections);
  cfg.distance.seed = count("seed", cfg.distance.seed);
  if (j.contains("eviction")) {
    const auto& e = j["eviction"];
    const auto parsed = e.is_string() ? parse_eviction(e.get<std::string>()) : std::nullopt;
    if (!parsed) throw ConfigInvalid("eviction must be \"stop_adding\" or \"fifo\"");
    cfg.eviction = *parsed;
  }
  cfg.validate();
  return cfg;
}

json to_json(const ChangePoint& cp) {
  return {{"index", cp.index},
          {"batch", cp.batch_ordinal},
          {"distance", cp.distance},
          {"threshold", cp.threshold}};
}

std::vector<WatchConfig> parse_grid(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("malformed grid JSON: ") + e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw ConfigInvalid("grid must be a nonempty JSON list of configs");
  }
  std::vector<WatchConfig> grid;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      grid.push_back(config_from_json(j[i]));
    } catch (const ConfigInvalid& e) {
      throw ConfigInvalid("grid entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return grid;
}

std::vector<WatchConfig> load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadErrorKind::io, "cannot open grid file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str());
}

}  // namespace watch
