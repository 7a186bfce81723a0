#include "pixelrl/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "pixelrl/actions.hpp"

namespace pixelrl {

namespace {

using Rgb3 = std::array<double, 3>;

struct Shape {
  bool ellipse;
  double cy, cx, ry, rx, angle;
  Rgb3 color;
  double stripe_freq;  // 0 = flat fill
  double stripe_angle;
};

bool inside(const Shape& s, double y, double x) {
  const double c = std::cos(s.angle), sn = std::sin(s.angle);
  const double dy = y - s.cy, dx = x - s.cx;
  const double u = (c * dx + sn * dy) / s.rx;
  const double v = (-sn * dx + c * dy) / s.ry;
  return s.ellipse ? u * u + v * v <= 1.0 : std::fabs(u) <= 1.0 && std::fabs(v) <= 1.0;
}

Rgb3 random_color(std::mt19937_64& rng, int channels) {
  std::uniform_real_distribution<double> u(0.08, 0.92);
  if (channels == 1) {
    const double g = u(rng);
    return {g, g, g};
  }
  return {u(rng), u(rng), u(rng)};
}

Shape random_shape(std::mt19937_64& rng, int h, int w, int channels) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double scale = std::min(h, w);
  Shape s{};
  s.ellipse = u(rng) < 0.5;
  s.cy = u(rng) * h;
  s.cx = u(rng) * w;
  s.ry = (0.08 + 0.3 * u(rng)) * scale;
  s.rx = (0.08 + 0.3 * u(rng)) * scale;
  s.angle = u(rng) * std::numbers::pi;
  s.color = random_color(rng, channels);
  s.stripe_freq = u(rng) < 0.3 ? 0.25 + 0.5 * u(rng) : 0.0;
  s.stripe_angle = u(rng) * std::numbers::pi;
  return s;
}

void paint(ImagePlane& img, const Shape& s) {
  const int channels = img.channels();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      if (!inside(s, y + 0.5, x + 0.5)) continue;
      double mod = 1.0;
      if (s.stripe_freq > 0.0) {
        const double t = std::cos(s.stripe_angle) * x + std::sin(s.stripe_angle) * y;
        mod = 0.8 + 0.2 * std::sin(s.stripe_freq * t);
      }
      for (int c = 0; c < channels; ++c) img.at(c, y, x) = s.color[c] * mod;
    }
}

void fill_background(ImagePlane& img, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int h = img.height(), w = img.width();
  const Rgb3 a = random_color(rng, img.channels()), b = random_color(rng, img.channels());
  const double theta = u(rng) * 2.0 * std::numbers::pi;
  const double fy = (0.5 + 1.5 * u(rng)) * std::numbers::pi / h;
  const double fx = (0.5 + 1.5 * u(rng)) * std::numbers::pi / w;
  const double phase = u(rng) * 2.0 * std::numbers::pi;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double t = 0.5 + 0.5 * ((std::cos(theta) * (x - w / 2.0)) / w + (std::sin(theta) * (y - h / 2.0)) / h);
      const double shade = 0.08 * std::sin(fy * y + phase) * std::cos(fx * x);
      for (int c = 0; c < img.channels(); ++c) img.at(c, y, x) = (1.0 - t) * a[c] + t * b[c] + shade;
    }
}

}  // namespace

ImagePlane synth_scene(int height, int width, int channels, std::uint64_t seed) {
  if (height < 1 || width < 1) throw InvalidInput("synth_scene: empty size");
  if (channels != 1 && channels != 3) throw InvalidInput("synth_scene: channels must be 1 or 3");
  std::mt19937_64 rng(seed);
  ImagePlane img(height, width, channels);
  fill_background(img, rng);
  std::uniform_int_distribution<int> count(3, 7);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) paint(img, random_shape(rng, height, width, channels));
  img.clip();
  return img;
}

ColorStyle parse_color_style(const std::string& name) {
  if (name == "warm-contrast") return ColorStyle::WarmContrast;
  if (name == "cool-bright") return ColorStyle::CoolBright;
  if (name == "faded") return ColorStyle::Faded;
  throw InvalidInput("unknown color style '" + name + "' (expected warm-contrast|cool-bright|faded)");
}

std::string to_string(ColorStyle style) {
  switch (style) {
    case ColorStyle::WarmContrast: return "warm-contrast";
    case ColorStyle::CoolBright: return "cool-bright";
    case ColorStyle::Faded: return "faded";
  }
  return "?";
}

ImagePlane apply_color_style(const ImagePlane& rgb, ColorStyle style) {
  if (rgb.channels() != 3) throw InvalidInput("apply_color_style: RGB image required");
  ImagePlane out = rgb;
  double vignette = 0.0;
  switch (style) {
    case ColorStyle::WarmContrast:
      out = color_adjust(out, ActionKind::Contrast, 1.10);
      out = color_adjust(out, ActionKind::Saturation, 1.15);
      out = color_adjust(out, ActionKind::RedGreen, 1.05);
      vignette = 0.15;
      break;
    case ColorStyle::CoolBright:
      out = color_adjust(out, ActionKind::Brightness, 1.10);
      out = color_adjust(out, ActionKind::GreenBlue, 1.08);
      out = color_adjust(out, ActionKind::Saturation, 0.90);
      vignette = 0.10;
      break;
    case ColorStyle::Faded:
      out = color_adjust(out, ActionKind::Contrast, 0.88);
      out = color_adjust(out, ActionKind::Saturation, 0.80);
      out = color_adjust(out, ActionKind::Brightness, 1.05);
      vignette = 0.20;
      break;
  }
  const int h = out.height(), w = out.width();
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  const double r2max = std::max(cy * cy + cx * cx, 1e-12);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double g = 1.0 - vignette * ((y - cy) * (y - cy) + (x - cx) * (x - cx)) / r2max;
      for (int c = 0; c < 3; ++c) out.at(c, y, x) *= g;
    }
  out.clip();
  return out;
}

SaliencyPair synth_saliency_pair(int height, int width, std::uint64_t seed) {
  if (height < 8 || width < 8) throw InvalidInput("synth_saliency_pair: image must be at least 8x8");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SaliencyPair p{ImagePlane(height, width, 3), ImagePlane(height, width, 1)};
  const double side = std::min(height, width);
  // Muted background and an inconspicuous target near its color; the vivid
  // distractors scattered around it hold the saliency before editing.
  std::uniform_real_distribution<double> mid(0.35, 0.6);
  const Rgb3 base{mid(rng), mid(rng), mid(rng)};
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) p.image.at(c, y, x) = base[c];
  Shape t{};
  t.ellipse = true;
  t.cy = height * (0.375 + 0.25 * u(rng));
  t.cx = width * (0.375 + 0.25 * u(rng));
  t.ry = side * (0.10 + 0.04 * u(rng));
  t.rx = side * (0.10 + 0.04 * u(rng));
  t.angle = u(rng) * std::numbers::pi;
  for (int c = 0; c < 3; ++c) t.color[c] = std::clamp(base[c] + 0.12 * (u(rng) - 0.5), 0.05, 0.95);
  const double t_reach = std::max(t.ry, t.rx);
  for (int placed = 0, tries = 0; placed < 10 && tries < 1000; ++tries) {
    Shape s{};
    s.ellipse = true;
    s.cy = u(rng) * height;
    s.cx = u(rng) * width;
    s.ry = s.rx = side * (0.05 + 0.06 * u(rng));
    for (double& v : s.color) v = u(rng) < 0.5 ? 0.95 : 0.05;
    if (std::hypot(s.cy - t.cy, s.cx - t.cx) < t_reach + s.ry + 0.05 * side) continue;
    paint(p.image, s);
    ++placed;
  }
  paint(p.image, t);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) p.mask.at(0, y, x) = inside(t, y + 0.5, x + 0.5) ? 1.0 : 0.0;
  p.image.clip();
  return p;
}

}  // namespace pixelrl
