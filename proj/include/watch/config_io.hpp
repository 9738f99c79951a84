#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "watch/detector.hpp"

namespace watch {

// WatchConfig as JSON: {"kappa", "mu", "epsilon", "omega", "p", "slices",
// "seed", "eviction"}. Absent fields take the defaults; unknown fields are
// rejected.

nlohmann::json to_json(const WatchConfig& cfg);
/// Throws ConfigInvalid on type errors, unknown keys or invalid values.
WatchConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChangePoint& cp);

/// A grid file is a nonempty JSON list of config objects. Throws
/// ConfigInvalid for bad content and LoadError when unreadable.
std::vector<WatchConfig> parse_grid(std::string_view text);
std::vector<WatchConfig> load_grid(const std::filesystem::path& path);

}  // namespace watch
