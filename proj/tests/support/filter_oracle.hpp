// Per-pixel brute-force reference for the gray filter actions. It pads the
// plane explicitly, then evaluates only the action chosen at each pixel.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "pixelrl/actions.hpp"

namespace oracle {

inline int mirror(int i, int n) {
  // Reflect without repeating the edge sample: -1 -> 1, n -> n - 2.
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
  return i;
}

inline double clip(double v) { return std::min(1.0, std::max(0.0, v)); }

// 5x5 window around (y, x), row-major.
inline std::array<double, 25> window(const std::vector<double>& plane, int h, int w, int y, int x) {
  std::array<double, 25> v{};
  int k = 0;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) v[k++] = plane[mirror(y + dy, h) * w + mirror(x + dx, w)];
  return v;
}

inline std::array<double, 25> gauss(double sigma) {
  std::array<double, 25> g{};
  int k = 0;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx) g[k++] = std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  return g;
}

inline double pixel(const pixelrl::Action& a, const std::vector<double>& plane, int h, int w, int y, int x) {
  using pixelrl::ActionKind;
  const double center = plane[y * w + x];
  auto v = window(plane, h, w, y, x);
  switch (a.kind) {
    case ActionKind::Box: {
      double s = 0.0;
      for (double e : v) s += e;
      return clip(s / 25);
    }
    case ActionKind::Gaussian: {
      auto g = gauss(a.sigma);
      double norm = 0.0;
      for (double e : g) norm += e;
      double s = 0.0;
      for (int i = 0; i < 25; ++i) s += (g[i] / norm) * v[i];
      return clip(s);
    }
    case ActionKind::Bilateral: {
      auto g = gauss(a.sigma_space);
      double s = 0.0, n = 0.0;
      for (int i = 0; i < 25; ++i) {
        const double d = v[i] - center;
        const double wt = g[i] * std::exp(-(d * d) / (2.0 * a.sigma_color * a.sigma_color));
        s += wt * v[i];
        n += wt;
      }
      return clip(s / n);
    }
    case ActionKind::Median:
      std::sort(v.begin(), v.end());
      return clip(v[12]);
    case ActionKind::AddOne:
      return clip(center + 1.0 / 255.0);
    case ActionKind::SubtractOne:
      return clip(center - 1.0 / 255.0);
    default:
      return center;
  }
}

// Applies amap pixel by pixel to every channel of img.
inline pixelrl::ImagePlane apply(const pixelrl::ImagePlane& img, const pixelrl::ActionMap& amap,
                                 const pixelrl::ActionSet& set) {
  pixelrl::ImagePlane out(img.height(), img.width(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const auto ch = img.channel(c);
    const std::vector<double> plane(ch.begin(), ch.end());
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) out.at(c, y, x) = pixel(set[amap.at(y, x)], plane, img.height(), img.width(), y, x);
  }
  return out;
}

}  // namespace oracle
