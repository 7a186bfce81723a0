#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pixelrl/env.hpp"
#include "pixelrl/saliency.hpp"
#include "pixelrl/synth.hpp"

namespace pixelrl {

enum class Phase { RmcOff, RmcOn };
Phase parse_phase(const std::string& name);
std::string to_string(Phase phase);

/// Training hyperparameters. Text form is flat "key = value" lines; see
/// config_keys() for the recognised keys. t_max has no default.
struct TrainConfig {
  Task task = Task::Denoise;
  double gamma = 0.95;
  int t_max = 0;
  int max_episode = 30000;
  double base_lr = 1e-3;
  double lr_power = 0.9;
  int minibatch = 64;
  int crop = 70;
  double value_loss_weight = 1.0;
  double entropy_beta = 0.0;
  double grad_clip = 0.0;  ///< global-norm clip; 0 disables
  Phase phase = Phase::RmcOff;
  bool bypass_rmc = false;  ///< use the plain per-pixel return recursion (rmc-off only)
  int kernel_side = 33;
  std::string arch = "standard";  ///< standard | tiny
  int width = 64;
  bool augment = true;
  NoiseKind noise = NoiseKind::Gaussian;
  double noise_level = 25.0;
  ColorStyle color_style = ColorStyle::WarmContrast;
  std::uint64_t seed = 0;
  int checkpoint_every = 300;
  SaliencyMethod saliency_method = SaliencyMethod::SpectralResidual;
  double saliency_alpha = 1.0;
  double saliency_beta = 0.5;
  int guided_radius = 4;
  double guided_eps = 1e-3;
  bool guided_smoothing = true;  ///< smooth saliency edits at test time
  int synth_count = 64;
  int synth_size = 96;
  std::string data_dir;       ///< empty: synthetic scenes
  std::string target_dir;     ///< color task with user-supplied pairs
  std::string documents_dir;  ///< restore task text source

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Recognised keys in canonical order.
const std::vector<std::string>& config_keys();

/// Parses key=value text ('#' starts a comment). Throws ConfigError listing
/// unknown keys, naming a missing t_max, or naming a key with a bad value.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::string& path);

/// Sets one key from its text form; ConfigError on unknown keys or bad values.
void set_config_value(TrainConfig& cfg, const std::string& key, const std::string& value);

/// Canonical text form; parse_config(config_to_text(c)) == c.
std::string config_to_text(const TrainConfig& cfg);

/// Range checks (gamma in [0,1], t_max >= 1, lr > 0, ...).
void validate(const TrainConfig& cfg);

}  // namespace pixelrl
