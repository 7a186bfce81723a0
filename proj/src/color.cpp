#include "pixelrl/color.hpp"

#include <algorithm>
#include <cmath>

namespace pixelrl {

namespace {

// sRGB primaries, D65. The reference white is the image of (1,1,1) so that
// white maps to a = b = 0 without rounding residue.
constexpr double kM[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                             {0.2126729, 0.7151522, 0.0721750},
                             {0.0193339, 0.1191920, 0.9503041}};
constexpr double kWhite[3] = {kM[0][0] + kM[0][1] + kM[0][2], kM[1][0] + kM[1][1] + kM[1][2],
                              kM[2][0] + kM[2][1] + kM[2][2]};
constexpr double kDelta = 6.0 / 29.0;

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }
double linear_to_srgb(double c) { return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055; }

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}
double lab_finv(double f) { return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0); }

// Inverse of kM, computed once.
struct InverseMatrix {
  double m[3][3];
  InverseMatrix() {
    const auto& a = kM;
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  }
};
const InverseMatrix kMinv;

}  // namespace

Lab rgb_to_lab(const Rgb& rgb) {
  const double lin[3] = {srgb_to_linear(rgb[0]), srgb_to_linear(rgb[1]), srgb_to_linear(rgb[2])};
  double f[3];
  for (int r = 0; r < 3; ++r) {
    const double v = kM[r][0] * lin[0] + kM[r][1] * lin[1] + kM[r][2] * lin[2];
    f[r] = lab_f(v / kWhite[r]);
  }
  return {116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

Rgb lab_to_rgb(const Lab& lab) {
  const double fy = (lab[0] + 16.0) / 116.0;
  const double fx = fy + lab[1] / 500.0;
  const double fz = fy - lab[2] / 200.0;
  const double xyz[3] = {kWhite[0] * lab_finv(fx), kWhite[1] * lab_finv(fy), kWhite[2] * lab_finv(fz)};
  Rgb out;
  for (int r = 0; r < 3; ++r) {
    const double lin = kMinv.m[r][0] * xyz[0] + kMinv.m[r][1] * xyz[1] + kMinv.m[r][2] * xyz[2];
    out[r] = std::clamp(linear_to_srgb(std::max(lin, 0.0)), 0.0, 1.0);
  }
  return out;
}

Hsv rgb_to_hsv(const Rgb& rgb) {
  const double mx = std::max({rgb[0], rgb[1], rgb[2]});
  const double mn = std::min({rgb[0], rgb[1], rgb[2]});
  const double c = mx - mn;
  double h = 0.0;
  if (c > 0.0) {
    if (mx == rgb[0]) h = std::fmod((rgb[1] - rgb[2]) / c + 6.0, 6.0);
    else if (mx == rgb[1]) h = (rgb[2] - rgb[0]) / c + 2.0;
    else h = (rgb[0] - rgb[1]) / c + 4.0;
  }
  const double s = mx > 0.0 ? c / mx : 0.0;
  return {h, s, mx};
}

Rgb hsv_to_rgb(const Hsv& hsv) {
  const double v = hsv[2];
  const double s = hsv[1];
  if (s <= 0.0) return {v, v, v};
  const double c = v * s;
  const double h = hsv[0];
  const double x = c * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
  const double m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {r + m, g + m, b + m};
}

LabPlanes to_cielab(const ImagePlane& rgb) {
  if (rgb.channels() != 3) throw InvalidInput("to_cielab: expected a 3-channel image");
  LabPlanes out{ScalarField(rgb.height(), rgb.width()), ScalarField(rgb.height(), rgb.width()),
                ScalarField(rgb.height(), rgb.width())};
  auto r = rgb.channel(0), g = rgb.channel(1), b = rgb.channel(2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Lab lab = rgb_to_lab({r[i], g[i], b[i]});
    out.L[i] = lab[0];
    out.a[i] = lab[1];
    out.b[i] = lab[2];
  }
  return out;
}

ImagePlane to_rgb(const LabPlanes& lab) {
  if (!lab.L.same_shape(lab.a) || !lab.L.same_shape(lab.b)) throw InvalidInput("to_rgb: plane shape mismatch");
  ImagePlane out(lab.L.height(), lab.L.width(), 3);
  for (std::size_t i = 0; i < lab.L.size(); ++i) {
    const Rgb rgb = lab_to_rgb({lab.L[i], lab.a[i], lab.b[i]});
    for (int c = 0; c < 3; ++c) out.channel(c)[i] = rgb[c];
  }
  return out;
}

}  // namespace pixelrl
