#include "pixelrl/config.hpp"

#include "pixelrl/network.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace pixelrl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  throw ConfigError("config key '" + key + "': bad value '" + value + "' (" + why + ")");
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "expected a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "expected true|false");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Field {
  std::string key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <class E, class Parse>
Field enum_field(std::string key, E TrainConfig::*member, Parse parse) {
  return {key,
          [key, member, parse](TrainConfig& c, const std::string& v) {
            try {
              c.*member = parse(v);
            } catch (const InvalidInput& e) {
              bad_value(key, v, e.what());
            }
          },
          [member](const TrainConfig& c) { return to_string(c.*member); }};
}

Field int_field(std::string key, int TrainConfig::*member) {
  return {key, [key, member](TrainConfig& c, const std::string& v) { c.*member = parse_number<int>(key, v); },
          [member](const TrainConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(std::string key, double TrainConfig::*member) {
  return {key, [key, member](TrainConfig& c, const std::string& v) { c.*member = parse_number<double>(key, v); },
          [member](const TrainConfig& c) { return format_double(c.*member); }};
}

Field bool_field(std::string key, bool TrainConfig::*member) {
  return {key, [key, member](TrainConfig& c, const std::string& v) { c.*member = parse_bool(key, v); },
          [member](const TrainConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Field string_field(std::string key, std::string TrainConfig::*member) {
  return {key, [member](TrainConfig& c, const std::string& v) { c.*member = v; },
          [member](const TrainConfig& c) { return c.*member; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      enum_field("task", &TrainConfig::task, parse_task),
      double_field("gamma", &TrainConfig::gamma),
      int_field("t_max", &TrainConfig::t_max),
      int_field("max_episode", &TrainConfig::max_episode),
      double_field("base_lr", &TrainConfig::base_lr),
      double_field("lr_power", &TrainConfig::lr_power),
      int_field("minibatch", &TrainConfig::minibatch),
      int_field("crop", &TrainConfig::crop),
      double_field("value_loss_weight", &TrainConfig::value_loss_weight),
      double_field("entropy_beta", &TrainConfig::entropy_beta),
      double_field("grad_clip", &TrainConfig::grad_clip),
      enum_field("phase", &TrainConfig::phase, parse_phase),
      bool_field("bypass_rmc", &TrainConfig::bypass_rmc),
      int_field("kernel_side", &TrainConfig::kernel_side),
      string_field("arch", &TrainConfig::arch),
      int_field("width", &TrainConfig::width),
      bool_field("augment", &TrainConfig::augment),
      enum_field("noise", &TrainConfig::noise, parse_noise_kind),
      double_field("noise_level", &TrainConfig::noise_level),
      enum_field("color_style", &TrainConfig::color_style, parse_color_style),
      {"seed", [](TrainConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); },
       [](const TrainConfig& c) { return std::to_string(c.seed); }},
      int_field("checkpoint_every", &TrainConfig::checkpoint_every),
      enum_field("saliency_method", &TrainConfig::saliency_method, parse_saliency_method),
      double_field("saliency_alpha", &TrainConfig::saliency_alpha),
      double_field("saliency_beta", &TrainConfig::saliency_beta),
      int_field("guided_radius", &TrainConfig::guided_radius),
      double_field("guided_eps", &TrainConfig::guided_eps),
      bool_field("guided_smoothing", &TrainConfig::guided_smoothing),
      int_field("synth_count", &TrainConfig::synth_count),
      int_field("synth_size", &TrainConfig::synth_size),
      string_field("data_dir", &TrainConfig::data_dir),
      string_field("target_dir", &TrainConfig::target_dir),
      string_field("documents_dir", &TrainConfig::documents_dir),
  };
  return f;
}

}  // namespace

Phase parse_phase(const std::string& name) {
  if (name == "rmc-off") return Phase::RmcOff;
  if (name == "rmc-on") return Phase::RmcOn;
  throw InvalidInput("unknown phase '" + name + "' (expected rmc-off|rmc-on)");
}

std::string to_string(Phase phase) { return phase == Phase::RmcOff ? "rmc-off" : "rmc-on"; }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(TrainConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : fields())
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  throw ConfigError("unknown config key: " + key);
}

TrainConfig parse_config(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  std::vector<std::string> unknown;
  std::vector<std::pair<std::string, std::string>> entries;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("config key '" + key + "' given twice");
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      unknown.push_back(key);
    else
      entries.emplace_back(key, value);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  if (!seen.contains("t_max")) throw ConfigError("missing required config key: t_max");
  for (const auto& [k, v] : entries) set_config_value(cfg, k, v);
  validate(cfg);
  return cfg;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_text(const TrainConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) fail("gamma must be in [0,1]");
  if (c.t_max < 1) fail("t_max must be >= 1");
  if (c.max_episode < 1) fail("max_episode must be >= 1");
  if (!(c.base_lr > 0.0)) fail("base_lr must be > 0");
  if (!(c.lr_power > 0.0)) fail("lr_power must be > 0");
  if (c.minibatch < 1) fail("minibatch must be >= 1");
  if (c.crop < 1) fail("crop must be >= 1");
  if (!(c.value_loss_weight >= 0.0)) fail("value_loss_weight must be >= 0");
  if (!(c.entropy_beta >= 0.0)) fail("entropy_beta must be >= 0");
  if (!(c.grad_clip >= 0.0)) fail("grad_clip must be >= 0");
  if (c.kernel_side < 1 || c.kernel_side % 2 == 0) fail("kernel_side must be odd and positive");
  if (c.arch != "standard" && c.arch != "tiny") fail("arch must be standard or tiny");
  if (c.width < 1) fail("width must be >= 1");
  const Architecture a = c.arch == "tiny" ? Architecture::tiny(1, 9, c.width) : Architecture::standard(1, 9, c.width);
  validate_receptive_field(a, c.kernel_side);
  if (c.bypass_rmc && c.phase == Phase::RmcOn) fail("bypass_rmc requires phase = rmc-off");
  if (c.checkpoint_every < 1) fail("checkpoint_every must be >= 1");
  if (c.guided_radius < 1 || !(c.guided_eps > 0.0)) fail("guided filter needs radius >= 1 and eps > 0");
  if (c.synth_count < 1 || c.synth_size < 8) fail("synthetic set needs synth_count >= 1 and synth_size >= 8");
}

}  // namespace pixelrl
