#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "pixelrl/image.hpp"

namespace testutil {

inline pixelrl::ImagePlane random_image(int h, int w, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  pixelrl::ImagePlane img(h, w, c);
  for (double& v : img.data()) v = u(rng);
  return img;
}

inline pixelrl::ScalarField random_field(int h, int w, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  pixelrl::ScalarField f(h, w);
  for (double& v : f.data()) v = u(rng);
  return f;
}

inline double rel_diff(double a, double b) {
  const double d = std::fabs(a - b), s = std::max(std::fabs(a), std::fabs(b));
  return s == 0.0 ? 0.0 : d / s;
}

}  // namespace testutil
