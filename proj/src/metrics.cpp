#include "pixelrl/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace pixelrl {

std::uint8_t to_u8(double x) {
  const double c = std::clamp(std::isnan(x) ? 0.0 : x, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

double mse_u8(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "mse");
  double acc = 0.0;
  const auto& da = a.data();
  const auto& db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(to_u8(da[i])) - static_cast<double>(to_u8(db[i]));
    acc += d * d;
  }
  return acc / static_cast<double>(da.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b, double peak) {
  const double mse = mse_u8(a, b);
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

namespace {

double ssim_channel(std::span<const double> pa, std::span<const double> pb, int h, int w) {
  int win = 11;
  while (win > std::min(h, w)) win -= 2;
  const int r = win / 2;
  std::vector<double> g(static_cast<std::size_t>(win) * win);
  double gsum = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
      g[(dy + r) * win + (dx + r)] = v;
      gsum += v;
    }
  for (double& v : g) v /= gsum;

  std::vector<double> a(pa.size()), b(pb.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = to_u8(pa[i]);
    b[i] = to_u8(pb[i]);
  }
  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

  double total = 0.0;
  int count = 0;
  for (int y = r; y < h - r; ++y)
    for (int x = r; x < w - r; ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const double wt = g[(dy + r) * win + (dx + r)];
          const double va = a[(y + dy) * w + x + dx];
          const double vb = b[(y + dy) * w + x + dx];
          ma += wt * va;
          mb += wt * vb;
          saa += wt * va * va;
          sbb += wt * vb * vb;
          sab += wt * va * vb;
        }
      const double va = saa - ma * ma;
      const double vb = sbb - mb * mb;
      const double cov = sab - ma * mb;
      total += ((2 * ma * mb + kC1) * (2 * cov + kC2)) / ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
      ++count;
    }
  return total / count;
}

}  // namespace

double ssim(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "ssim");
  double acc = 0.0;
  for (int c = 0; c < a.channels(); ++c) acc += ssim_channel(a.channel(c), b.channel(c), a.height(), a.width());
  return acc / a.channels();
}

}  // namespace pixelrl
