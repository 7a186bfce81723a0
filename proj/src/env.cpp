#include "pixelrl/env.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "pixelrl/color.hpp"
#include "pixelrl/image_ops.hpp"

namespace pixelrl {

Task parse_task(const std::string& name) {
  if (name == "denoise") return Task::Denoise;
  if (name == "restore") return Task::Restore;
  if (name == "color") return Task::Color;
  if (name == "saliency") return Task::Saliency;
  throw InvalidInput("unknown task '" + name + "' (expected denoise|restore|color|saliency)");
}

std::string to_string(Task task) {
  switch (task) {
    case Task::Denoise: return "denoise";
    case Task::Restore: return "restore";
    case Task::Color: return "color";
    case Task::Saliency: return "saliency";
  }
  return "?";
}

ActionDomain action_domain_for(Task task) {
  return task == Task::Denoise || task == Task::Restore ? ActionDomain::GrayFiltering : ActionDomain::ColorEnhancement;
}

int image_channels_for(Task task) { return task == Task::Denoise || task == Task::Restore ? 1 : 3; }

int observation_channels(Task task) {
  switch (task) {
    case Task::Denoise:
    case Task::Restore: return 1;
    case Task::Color: return 3;
    case Task::Saliency: return 4;
  }
  return 1;
}

// ---- corruption -----------------------------------------------------------

ImagePlane add_gaussian_noise(const ImagePlane& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidInput("add_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return img;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma / 255.0);
  ImagePlane out = img;
  for (double& v : out.data()) v += n(rng);
  out.clip();
  return out;
}

ImagePlane add_poisson_noise(const ImagePlane& img, double peak, std::uint64_t seed) {
  if (!(peak > 0.0)) throw InvalidInput("add_poisson_noise: peak must be > 0");
  std::mt19937_64 rng(seed);
  ImagePlane out = img;
  for (double& v : out.data()) {
    const double mean = std::clamp(v, 0.0, 1.0) * peak;
    if (mean <= 0.0) {
      v = 0.0;
      continue;
    }
    std::poisson_distribution<long long> p(mean);
    v = static_cast<double>(p(rng)) / peak;
  }
  out.clip();
  return out;
}

ImagePlane add_salt_pepper(const ImagePlane& img, double density, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw InvalidInput("add_salt_pepper: density must be in [0,1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImagePlane out = img;
  const std::size_t n = img.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    const bool hit = u(rng) < density;
    const double value = u(rng) < 0.5 ? 0.0 : 1.0;
    if (!hit) continue;
    for (int c = 0; c < img.channels(); ++c) out.channel(c)[i] = value;
  }
  return out;
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "poisson") return NoiseKind::Poisson;
  if (name == "saltpepper" || name == "salt-pepper" || name == "sp") return NoiseKind::SaltPepper;
  throw InvalidInput("unknown noise kind '" + name + "' (expected gaussian|poisson|saltpepper)");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Poisson: return "poisson";
    case NoiseKind::SaltPepper: return "saltpepper";
  }
  return "?";
}

ImagePlane add_noise(const ImagePlane& img, NoiseKind kind, double level, std::uint64_t seed) {
  switch (kind) {
    case NoiseKind::Gaussian: return add_gaussian_noise(img, level, seed);
    case NoiseKind::Poisson: return add_poisson_noise(img, level, seed);
    case NoiseKind::SaltPepper: return add_salt_pepper(img, level, seed);
  }
  throw InvalidInput("add_noise: bad kind");
}

namespace {

struct FontChoice {
  int face;
  int thickness;
  const char* name;
};

FontChoice pick_font(std::mt19937_64& rng, int size) {
  std::uniform_int_distribution<int> family(0, 1), style(0, 3);
  const int fam = family(rng), sty = style(rng);
  const bool bold = sty == 1 || sty == 3;
  const bool italic = sty >= 2;
  static const char* names[2][4] = {{"sans", "sans-bold", "sans-italic", "sans-bold-italic"},
                                    {"serif", "serif-bold", "serif-italic", "serif-bold-italic"}};
  int face = fam == 0 ? (bold ? cv::FONT_HERSHEY_DUPLEX : cv::FONT_HERSHEY_SIMPLEX)
                      : (bold ? cv::FONT_HERSHEY_TRIPLEX : cv::FONT_HERSHEY_COMPLEX);
  if (italic) face |= cv::FONT_ITALIC;
  const int thickness = std::max(1, static_cast<int>(std::lround(size / 14.0))) + (bold ? 1 : 0);
  return {face, thickness, names[fam][sty]};
}

std::vector<std::string> split_words(const std::string& doc) {
  std::istringstream is(doc);
  std::vector<std::string> words;
  std::string w;
  while (is >> w) words.push_back(w);
  return words;
}

}  // namespace

TextOverlay overlay_text(const ImagePlane& img, const std::string& document, std::uint64_t seed) {
  if (document.empty()) throw InvalidInput("overlay_text: empty document");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_dist(10, 30);
  std::uniform_int_distribution<int> ink_dist(0, 1);

  TextOverlay res;
  res.font_size = size_dist(rng);
  const FontChoice font = pick_font(rng, res.font_size);
  res.font = font.name;
  res.intensity = ink_dist(rng) == 0 ? 0.0 : 1.0;
  res.image = img;
  res.mask = ImagePlane(img.height(), img.width(), 1, 0.0);

  const auto words = split_words(document);
  if (words.empty()) return res;

  int base = 0;
  const cv::Size ref = cv::getTextSize("Hg", font.face, 1.0, font.thickness, &base);
  const double scale = res.font_size / static_cast<double>(ref.height + base);
  const int line_height = static_cast<int>(std::lround(res.font_size * 1.2));

  cv::Mat canvas(img.height(), img.width(), CV_8UC1, cv::Scalar(0));
  std::uniform_int_distribution<int> indent(0, 4);
  int y = res.font_size;
  std::size_t wi = 0;
  while (y < img.height() + res.font_size && wi < words.size()) {
    std::string line;
    const int x0 = indent(rng);
    while (wi < words.size()) {
      const std::string candidate = line.empty() ? words[wi] : line + " " + words[wi];
      const int width = cv::getTextSize(candidate, font.face, scale, font.thickness, &base).width;
      if (!line.empty() && x0 + width > img.width()) break;
      line = candidate;
      ++wi;
    }
    cv::putText(canvas, line, cv::Point(x0, y), font.face, scale, cv::Scalar(255), font.thickness, cv::LINE_8);
    y += line_height;
  }

  for (int yy = 0; yy < img.height(); ++yy)
    for (int xx = 0; xx < img.width(); ++xx) {
      if (canvas.at<std::uint8_t>(yy, xx) == 0) continue;
      res.mask.at(0, yy, xx) = 1.0;
      for (int c = 0; c < img.channels(); ++c) res.image.at(c, yy, xx) = res.intensity;
    }
  return res;
}

// ---- rewards --------------------------------------------------------------

ScalarField reward_denoise(const ImagePlane& prev, const ImagePlane& next, const ImagePlane& target) {
  require_same_shape(prev, next, "reward_denoise");
  require_same_shape(prev, target, "reward_denoise");
  ScalarField r(prev.height(), prev.width());
  const std::size_t n = prev.pixels();
  for (int c = 0; c < prev.channels(); ++c) {
    auto p = prev.channel(c), q = next.channel(c), t = target.channel(c);
    for (std::size_t i = 0; i < n; ++i) {
      const double before = 255.0 * (t[i] - p[i]);
      const double after = 255.0 * (t[i] - q[i]);
      r[i] += before * before - after * after;
    }
  }
  if (prev.channels() > 1)
    for (double& v : r.data()) v /= prev.channels();
  return r;
}

ScalarField reward_color(const ImagePlane& prev, const ImagePlane& next, const ImagePlane& target) {
  if (prev.channels() != 3 || next.channels() != 3 || target.channels() != 3)
    throw InvalidInput("reward_color: images must be 3-channel RGB");
  require_same_shape(prev, next, "reward_color");
  require_same_shape(prev, target, "reward_color");
  ScalarField r(prev.height(), prev.width());
  for (std::size_t i = 0; i < prev.pixels(); ++i) {
    auto lab = [&](const ImagePlane& im) {
      return rgb_to_lab({im.channel(0)[i], im.channel(1)[i], im.channel(2)[i]});
    };
    const Lab t = lab(target), p = lab(prev), q = lab(next);
    const double dp = std::sqrt((t[0] - p[0]) * (t[0] - p[0]) + (t[1] - p[1]) * (t[1] - p[1]) + (t[2] - p[2]) * (t[2] - p[2]));
    const double dq = std::sqrt((t[0] - q[0]) * (t[0] - q[0]) + (t[1] - q[1]) * (t[1] - q[1]) + (t[2] - q[2]) * (t[2] - q[2]));
    r[i] = dp - dq;
  }
  return r;
}

ScalarField reward_saliency_maps(const ScalarField& s_prev, const ScalarField& s_next, const ImagePlane& mask,
                                 double alpha, double beta) {
  require_same_shape(s_prev, s_next, "reward_saliency");
  if (!s_prev.same_shape(mask)) throw InvalidInput("reward_saliency: mask size mismatch");
  ScalarField r(s_prev.height(), s_prev.width());
  auto m = mask.channel(0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double ds = s_next[i] - s_prev[i];
    r[i] = m[i] > 0.5 ? alpha * ds : -beta * ds;
  }
  return r;
}

ScalarField reward_saliency(const ImagePlane& prev, const ImagePlane& next, const ImagePlane& mask,
                            const SaliencyEstimator& estimator, double alpha, double beta) {
  require_same_shape(prev, next, "reward_saliency");
  if (prev == next) return ScalarField(prev.height(), prev.width(), 0.0);
  // Maps are read on the 8-bit scale, like the pixel rewards of the other tasks.
  return reward_saliency_maps(estimator.estimate(prev), estimator.estimate(next), mask, 255.0 * alpha, 255.0 * beta);
}

// ---- episodes -------------------------------------------------------------

EnvState EnvState::start(Task task, ImagePlane input, std::optional<ImagePlane> target,
                         std::optional<ImagePlane> mask, int t_max) {
  if (t_max < 1) throw InvalidInput("EnvState: t_max must be >= 1");
  const bool needs_target = task != Task::Saliency;
  if (needs_target != target.has_value())
    throw InvalidInput("EnvState: target must be present exactly for denoise/restore/color");
  if ((task == Task::Saliency) != mask.has_value())
    throw InvalidInput("EnvState: mask must be present exactly for the saliency task");
  if (input.channels() != image_channels_for(task))
    throw InvalidInput("EnvState: task " + to_string(task) + " expects " + std::to_string(image_channels_for(task)) +
                       "-channel images");
  if (target) require_same_shape(input, *target, "EnvState target");
  if (mask) {
    if (mask->height() != input.height() || mask->width() != input.width() || mask->channels() != 1)
      throw InvalidInput("EnvState: mask must be single-channel with the image size");
    for (double& v : mask->data()) v = v > 0.5 ? 1.0 : 0.0;
  }
  EnvState s;
  s.current = std::move(input);
  s.target = std::move(target);
  s.mask = std::move(mask);
  s.t = 0;
  s.t_max = t_max;
  s.task = task;
  return s;
}

ImagePlane smooth_edit(const ImagePlane& prev, const ImagePlane& next, int radius, double eps) {
  require_same_shape(prev, next, "smooth_edit");
  const ScalarField guide = field_from_channel(to_gray(prev), 0);
  ImagePlane out = prev;
  for (int c = 0; c < prev.channels(); ++c) {
    ScalarField edit(prev.height(), prev.width());
    auto p = prev.channel(c), q = next.channel(c);
    for (std::size_t i = 0; i < edit.size(); ++i) edit[i] = q[i] - p[i];
    const ScalarField smoothed = guided_filter_field(edit, guide, radius, eps);
    auto o = out.channel(c);
    for (std::size_t i = 0; i < edit.size(); ++i) o[i] = p[i] + smoothed[i];
  }
  out.clip();
  return out;
}

StepResult step(const EnvState& state, const ActionMap& amap, const ActionSet& set, const TaskParams& params,
                Backend backend) {
  if (state.done()) throw StateError("step: episode already finished (t == t_max)");
  if (set.domain() != action_domain_for(state.task))
    throw InvalidInput("step: action set does not match task " + to_string(state.task));
  StepResult res;
  res.state = state;
  ImagePlane next = apply_action_map(state.current, amap, set, backend);
  switch (state.task) {
    case Task::Denoise:
    case Task::Restore:
      res.reward = reward_denoise(state.current, next, *state.target);
      break;
    case Task::Color:
      res.reward = reward_color(state.current, next, *state.target);
      break;
    case Task::Saliency:
      if (params.guided_smoothing) next = smooth_edit(state.current, next, params.guided_radius, params.guided_eps);
      res.reward = reward_saliency(state.current, next, *state.mask, params.estimator, params.alpha, params.beta);
      break;
  }
  res.state.current = std::move(next);
  res.state.t = state.t + 1;
  res.done = res.state.done();
  return res;
}

ImagePlane observation(const EnvState& state) {
  const ImagePlane& img = state.current;
  if (state.task == Task::Denoise || state.task == Task::Restore) return img;
  const int ch = observation_channels(state.task);
  ImagePlane obs(img.height(), img.width(), ch);
  const LabPlanes lab = to_cielab(img);
  for (std::size_t i = 0; i < img.pixels(); ++i) {
    obs.channel(0)[i] = lab.L[i] / 100.0;
    obs.channel(1)[i] = lab.a[i] / 128.0;
    obs.channel(2)[i] = lab.b[i] / 128.0;
    if (ch == 4) obs.channel(3)[i] = state.mask->channel(0)[i];
  }
  return obs;
}

}  // namespace pixelrl
