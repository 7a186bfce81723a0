#include "pixelrl/eval.hpp"

#include <cstdio>
#include <exception>
#include <random>

#include "pixelrl/image_ops.hpp"
#include "pixelrl/metrics.hpp"

namespace pixelrl {

ImagePlane advance(Task task, const ImagePlane& img, const ActionMap& amap, const ActionSet& set,
                   const TaskParams& params, Backend backend) {
  ImagePlane next = apply_action_map(img, amap, set, backend);
  if (task == Task::Saliency && params.guided_smoothing)
    next = smooth_edit(img, next, params.guided_radius, params.guided_eps);
  return next;
}

Rollout policy_rollout(const Network& net, Task task, const ImagePlane& input, const std::optional<ImagePlane>& mask,
                       int t_max, const TaskParams& params, SampleMode mode, std::uint64_t seed, Backend backend) {
  if (t_max < 1) throw InvalidInput("rollout: t_max must be >= 1");
  if (task == Task::Saliency && !mask) throw InvalidInput("rollout: saliency task needs a mask");
  const ActionSet set = ActionSet::build(action_domain_for(task));
  if (net.arch().actions != set.size()) throw InvalidInput("rollout: network action count does not match task");
  std::mt19937_64 rng(seed);
  Rollout out;
  out.images.push_back(input);
  EnvState s;
  s.task = task;
  s.mask = mask;
  s.t_max = t_max;
  Tensor hidden;
  for (int t = 0; t < t_max; ++t) {
    s.current = out.images.back();
    const PolicyValue pv = forward(net, observation(s), hidden, backend);
    out.actions.push_back(sample_actions(pv.policy, mode, rng));
    out.images.push_back(advance(task, s.current, out.actions.back(), set, params, backend));
    hidden = pv.hidden;
  }
  return out;
}

Rollout random_rollout(Task task, const ImagePlane& input, const std::optional<ImagePlane>& mask, int t_max,
                       const TaskParams& params, std::uint64_t seed, Backend backend) {
  if (t_max < 1) throw InvalidInput("rollout: t_max must be >= 1");
  (void)mask;
  const ActionSet set = ActionSet::build(action_domain_for(task));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, set.size() - 1);
  Rollout out;
  out.images.push_back(input);
  for (int t = 0; t < t_max; ++t) {
    ActionMap amap(input.height(), input.width());
    for (auto& id : amap.ids) id = static_cast<std::uint8_t>(pick(rng));
    out.images.push_back(advance(task, out.images.back(), amap, set, params, backend));
    out.actions.push_back(std::move(amap));
  }
  return out;
}

ImagePlane restore_image(const Network& net, Task task, const ImagePlane& input, int t_max, const TaskParams& params,
                         bool use_augment8, Backend backend) {
  if (task == Task::Saliency) throw InvalidInput("restore_image: saliency editing needs a mask; use saliency-edit");
  if (!use_augment8) return policy_rollout(net, task, input, std::nullopt, t_max, params, SampleMode::Greedy, 0, backend).images.back();
  const auto copies = augment8(input);
  std::array<ImagePlane, 8> outs;
  for (int k = 0; k < 8; ++k)
    outs[k] = policy_rollout(net, task, copies[k], std::nullopt, t_max, params, SampleMode::Greedy, 0, backend).images.back();
  return fuse_augmented(inverse_augment8(outs));
}

EvalReport evaluate(const std::vector<std::string>& names, const std::vector<ImagePlane>& corrupted,
                    const std::vector<ImagePlane>& clean,
                    const std::function<ImagePlane(const ImagePlane&, std::size_t)>& process) {
  if (corrupted.size() != clean.size() || names.size() != clean.size())
    throw InvalidInput("evaluate: names/corrupted/clean sizes differ");
  if (clean.empty()) throw InvalidInput("evaluate: empty set");
  EvalReport rep;
  rep.rows.resize(clean.size());
  std::exception_ptr err;
  const auto n = static_cast<std::ptrdiff_t>(clean.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const ImagePlane out = process(corrupted[i], static_cast<std::size_t>(i));
      ImageScore& s = rep.rows[i];
      s.name = names[i];
      s.psnr_in = psnr(corrupted[i], clean[i]);
      s.psnr_out = psnr(out, clean[i]);
      s.ssim_in = ssim(corrupted[i], clean[i]);
      s.ssim_out = ssim(out, clean[i]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  for (const auto& r : rep.rows) {
    rep.mean_psnr_in += r.psnr_in;
    rep.mean_psnr_out += r.psnr_out;
    rep.mean_ssim_in += r.ssim_in;
    rep.mean_ssim_out += r.ssim_out;
  }
  const double k = static_cast<double>(rep.rows.size());
  rep.mean_psnr_in /= k;
  rep.mean_psnr_out /= k;
  rep.mean_ssim_in /= k;
  rep.mean_ssim_out /= k;
  return rep;
}

std::string report_csv(const EvalReport& rep) {
  std::string out = "name,psnr_in,psnr_out,ssim_in,ssim_out\n";
  char buf[256];
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.5f,%.5f\n", r.psnr_in, r.psnr_out, r.ssim_in, r.ssim_out);
    out += r.name + buf;
  }
  std::snprintf(buf, sizeof buf, "mean,%.4f,%.4f,%.5f,%.5f\n", rep.mean_psnr_in, rep.mean_psnr_out, rep.mean_ssim_in,
                rep.mean_ssim_out);
  return out + buf;
}

}  // namespace pixelrl
