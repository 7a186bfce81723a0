#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pixelrl/env.hpp"
#include "pixelrl/network.hpp"

namespace pixelrl {

/// images[0] is the input, images[t + 1] the result of step t.
struct Rollout {
  std::vector<ImagePlane> images;
  std::vector<ActionMap> actions;
};

/// Next image for a task without computing a reward (saliency edits are
/// guided-filter smoothed when the params ask for it).
ImagePlane advance(Task task, const ImagePlane& img, const ActionMap& amap, const ActionSet& set,
                   const TaskParams& params, Backend backend = Backend::OpenMP);

/// t_max steps of the network policy from a zero hidden state.
Rollout policy_rollout(const Network& net, Task task, const ImagePlane& input, const std::optional<ImagePlane>& mask,
                       int t_max, const TaskParams& params, SampleMode mode, std::uint64_t seed = 0,
                       Backend backend = Backend::OpenMP);

/// t_max steps of independent uniform-random per-pixel actions.
Rollout random_rollout(Task task, const ImagePlane& input, const std::optional<ImagePlane>& mask, int t_max,
                       const TaskParams& params, std::uint64_t seed, Backend backend = Backend::OpenMP);

/// Greedy rollout; with augment8 the eight dihedral copies are processed
/// independently, mapped back and averaged pixel-wise.
ImagePlane restore_image(const Network& net, Task task, const ImagePlane& input, int t_max, const TaskParams& params,
                         bool augment8, Backend backend = Backend::OpenMP);

struct ImageScore {
  std::string name;
  double psnr_in = 0.0, psnr_out = 0.0;
  double ssim_in = 0.0, ssim_out = 0.0;
};

struct EvalReport {
  std::vector<ImageScore> rows;
  double mean_psnr_in = 0.0, mean_psnr_out = 0.0;
  double mean_ssim_in = 0.0, mean_ssim_out = 0.0;
};

/// Scores process(corrupted[i], i) against clean[i] for every image, in parallel.
EvalReport evaluate(const std::vector<std::string>& names, const std::vector<ImagePlane>& corrupted,
                    const std::vector<ImagePlane>& clean,
                    const std::function<ImagePlane(const ImagePlane&, std::size_t)>& process);

/// "name,psnr_in,psnr_out,ssim_in,ssim_out" rows plus a final "mean" row.
std::string report_csv(const EvalReport& report);

}  // namespace pixelrl
