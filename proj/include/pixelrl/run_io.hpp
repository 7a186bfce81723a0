#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pixelrl/actions.hpp"

namespace pixelrl {

inline constexpr const char* kToolVersion = "pixelrl 1.0";

/// Serialized next to every run; enough to reproduce it.
struct RunManifest {
  std::string command;
  std::string task;
  std::uint64_t seed = 0;
  std::string config;  ///< canonical key = value text
  std::vector<std::string> datasets;
  std::string checkpoint;
  std::string metrics;
  std::map<std::string, std::string> extra;  ///< command-specific facts (noise level, per-image seeds, ...)
  std::string tool_version = kToolVersion;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  void write(const std::filesystem::path& path) const;
  static RunManifest read(const std::filesystem::path& path);

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

/// Creates dir. An existing non-empty dir is an error unless force is set.
void prepare_output_dir(const std::filesystem::path& dir, bool force);

/// Fixed palette: entry i is the color of action id i (up to 16 actions).
const std::vector<std::array<std::uint8_t, 3>>& action_palette();

/// Pixels per action id.
std::vector<std::size_t> action_counts(const ActionMap& amap, int actions);

/// Indexed PNG whose palette index is the action id.
void write_action_map_png(const std::filesystem::path& path, const ActionMap& amap, int actions);

/// One line per action: id, palette color (#rrggbb), name.
std::string palette_legend(const ActionSet& set);

}  // namespace pixelrl
