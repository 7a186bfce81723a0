#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pixelrl/actions.hpp"
#include "pixelrl/image.hpp"
#include "pixelrl/saliency.hpp"

namespace pixelrl {

enum class Task { Denoise, Restore, Color, Saliency };

Task parse_task(const std::string& name);
std::string to_string(Task task);
/// Action catalog used by a task (gray filters or color adjustments).
ActionDomain action_domain_for(Task task);
/// Channels of the episode image (1 gray, 3 RGB).
int image_channels_for(Task task);

// ---- corruption synthesis -------------------------------------------------

/// img + N(0, sigma^2) per element, sigma on the 0-255 scale, clipped to [0,1].
ImagePlane add_gaussian_noise(const ImagePlane& img, double sigma, std::uint64_t seed);
/// k ~ Poisson(x * peak), output k / peak clipped to [0,1].
ImagePlane add_poisson_noise(const ImagePlane& img, double peak, std::uint64_t seed);
/// Each pixel (all channels together) becomes 0 or 1 with equal odds with probability density.
ImagePlane add_salt_pepper(const ImagePlane& img, double density, std::uint64_t seed);

struct TextOverlay {
  ImagePlane image;
  /// 1 where text was drawn. Diagnostics only: the restoration agent never sees it.
  ImagePlane mask;
  int font_size = 0;
  std::string font;
  double intensity = 0.0;
};

/// Rasterizes word-wrapped lines of `document` over img. Font size is uniform
/// in [10,30] pixels, face uniform over {sans, serif} x {regular, bold, italic,
/// bold-italic} (Hershey vector fonts), text intensity 0 or 1.
TextOverlay overlay_text(const ImagePlane& img, const std::string& document, std::uint64_t seed);

enum class NoiseKind { Gaussian, Poisson, SaltPepper };
NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);
ImagePlane add_noise(const ImagePlane& img, NoiseKind kind, double level, std::uint64_t seed);

// ---- rewards --------------------------------------------------------------

/// r_i = (target_i - prev_i)^2 - (target_i - next_i)^2 on the 0-255 scale,
/// averaged over channels for multi-channel images.
ScalarField reward_denoise(const ImagePlane& prev, const ImagePlane& next, const ImagePlane& target);

/// r_i = |Lab(target)_i - Lab(prev)_i| - |Lab(target)_i - Lab(next)_i|.
ScalarField reward_color(const ImagePlane& prev, const ImagePlane& next, const ImagePlane& target);

/// dS = 255 * (S(next) - S(prev)) with S in [0,1]; r = alpha*dS inside the mask, -beta*dS outside.
ScalarField reward_saliency(const ImagePlane& prev, const ImagePlane& next, const ImagePlane& mask,
                            const SaliencyEstimator& estimator, double alpha = 1.0, double beta = 0.5);

/// r = alpha*dS inside the mask, -beta*dS outside, on precomputed maps as given (no 255 scaling).
ScalarField reward_saliency_maps(const ScalarField& s_prev, const ScalarField& s_next, const ImagePlane& mask,
                                 double alpha = 1.0, double beta = 0.5);

// ---- episodes -------------------------------------------------------------

struct EnvState {
  ImagePlane current;
  std::optional<ImagePlane> target;
  std::optional<ImagePlane> mask;
  int t = 0;
  int t_max = 1;
  Task task = Task::Denoise;

  static EnvState start(Task task, ImagePlane input, std::optional<ImagePlane> target,
                        std::optional<ImagePlane> mask, int t_max);
  bool done() const { return t >= t_max; }
};

/// Task parameters that are not part of the episode state.
struct TaskParams {
  SaliencyEstimator estimator{};
  double alpha = 1.0;
  double beta = 0.5;
  /// Guided filter applied to each saliency-task edit (guide = pre-step image).
  /// Used for evaluation; training rollouts switch it off.
  int guided_radius = 4;
  double guided_eps = 1e-3;
  bool guided_smoothing = true;
};

struct StepResult {
  EnvState state;
  ScalarField reward;
  bool done = false;
};

/// One synchronous step of all pixel agents. Never mutates `state`.
StepResult step(const EnvState& state, const ActionMap& amap, const ActionSet& set, const TaskParams& params = {},
                Backend backend = Backend::OpenMP);

/// Saliency-task post-processing: the per-pixel edit (next - prev) is smoothed by a
/// guided filter whose guide is prev, then re-applied and clipped. A zero edit stays zero.
ImagePlane smooth_edit(const ImagePlane& prev, const ImagePlane& next, int radius, double eps);

/// Network input for a state: gray -> 1 channel; color -> normalized Lab
/// (L/100, a/128, b/128); saliency -> normalized Lab + mask.
ImagePlane observation(const EnvState& state);
int observation_channels(Task task);

}  // namespace pixelrl
