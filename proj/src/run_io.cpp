#include "pixelrl/run_io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pixelrl/png_io.hpp"

namespace pixelrl {

std::string RunManifest::to_json() const {
  nlohmann::json j = {{"tool_version", tool_version}, {"command", command}, {"task", task},
                      {"seed", seed},                 {"config", config},   {"datasets", datasets},
                      {"checkpoint", checkpoint},     {"metrics", metrics}, {"extra", extra}};
  return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.task = j.at("task").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.at("config").get<std::string>();
    m.datasets = j.at("datasets").get<std::vector<std::string>>();
    m.checkpoint = j.at("checkpoint").get<std::string>();
    m.metrics = j.at("metrics").get<std::string>();
    m.extra = j.at("extra").get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("manifest: ") + e.what());
  }
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InvalidInput("manifest: cannot write " + path.string());
  out << to_json() << "\n";
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("manifest: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void prepare_output_dir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw InvalidInput("output path exists and is not a directory: " + dir.string());
    if (!fs::is_empty(dir) && !force)
      throw InvalidInput("refusing to overwrite non-empty output directory " + dir.string() + " (pass --force)");
  }
  fs::create_directories(dir);
}

const std::vector<std::array<std::uint8_t, 3>>& action_palette() {
  // Distinct hues. Entries 8 and 12 are grays because those ids are
  // "do nothing" in the filter and color action sets.
  static const std::vector<std::array<std::uint8_t, 3>> p = {
      {230, 25, 75},   {60, 180, 75},  {255, 225, 25}, {0, 130, 200},  {245, 130, 48}, {145, 30, 180},
      {70, 240, 240},  {240, 50, 230}, {128, 128, 128}, {0, 128, 128}, {170, 110, 40}, {128, 0, 0},
      {200, 200, 200}, {0, 0, 128},    {255, 250, 200}, {0, 0, 0},
  };
  return p;
}

std::vector<std::size_t> action_counts(const ActionMap& amap, int actions) {
  std::vector<std::size_t> c(static_cast<std::size_t>(actions), 0);
  for (auto id : amap.ids) {
    if (id >= actions) throw InvalidInput("action_counts: id outside the action set");
    ++c[id];
  }
  return c;
}

void write_action_map_png(const std::filesystem::path& path, const ActionMap& amap, int actions) {
  const auto& pal = action_palette();
  if (actions > static_cast<int>(pal.size())) throw InvalidInput("action map: palette holds at most 16 actions");
  for (auto id : amap.ids)
    if (id >= actions) throw InvalidInput("action map: id outside the action set");
  write_indexed_png(path, amap.height, amap.width, amap.ids,
                    std::vector<std::array<std::uint8_t, 3>>(pal.begin(), pal.begin() + actions));
}

std::string palette_legend(const ActionSet& set) {
  std::string out = "# id\tcolor\tname\n";
  const auto& pal = action_palette();
  char buf[32];
  for (const auto& a : set.actions()) {
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", pal[a.id][0], pal[a.id][1], pal[a.id][2]);
    out += std::to_string(a.id) + "\t" + buf + "\t" + a.name + "\n";
  }
  return out;
}

}  // namespace pixelrl
