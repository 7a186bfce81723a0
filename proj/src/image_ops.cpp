#include "pixelrl/image_ops.hpp"

#include <algorithm>
#include <cmath>

namespace pixelrl {

ScalarField field_from_channel(const ImagePlane& img, int c) {
  ScalarField f(img.height(), img.width());
  auto src = img.channel(c);
  std::copy(src.begin(), src.end(), f.data().begin());
  return f;
}

ScalarField box_mean(const ScalarField& field, int radius) {
  const int h = field.height(), w = field.width();
  // Summed-area table with a zero row/column in front.
  std::vector<double> sat(static_cast<std::size_t>(h + 1) * (w + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += field.at(y, x);
      sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
    }
  }
  ScalarField out(h, w);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius), y1 = std::min(h, y + radius + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius), x1 = std::min(w, x + radius + 1);
      const double s = sat[y1 * (w + 1) + x1] - sat[y0 * (w + 1) + x1] - sat[y1 * (w + 1) + x0] + sat[y0 * (w + 1) + x0];
      out.at(y, x) = s / static_cast<double>((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}

ScalarField guided_filter_field(const ScalarField& p, const ScalarField& guide, int radius, double eps) {
  if (radius < 1) throw InvalidInput("guided_filter: radius must be >= 1");
  if (!(eps > 0.0)) throw InvalidInput("guided_filter: eps must be > 0");
  require_same_shape(p, guide, "guided_filter");
  const std::size_t n = p.size();
  ScalarField ii(p.height(), p.width()), ip(p.height(), p.width());
  for (std::size_t i = 0; i < n; ++i) {
    ii[i] = guide[i] * guide[i];
    ip[i] = guide[i] * p[i];
  }
  const ScalarField mean_i = box_mean(guide, radius);
  const ScalarField mean_p = box_mean(p, radius);
  const ScalarField corr_ii = box_mean(ii, radius);
  const ScalarField corr_ip = box_mean(ip, radius);
  ScalarField a(p.height(), p.width()), b(p.height(), p.width());
  for (std::size_t i = 0; i < n; ++i) {
    const double var = corr_ii[i] - mean_i[i] * mean_i[i];
    const double cov = corr_ip[i] - mean_i[i] * mean_p[i];
    a[i] = cov / (var + eps);
    b[i] = mean_p[i] - a[i] * mean_i[i];
  }
  const ScalarField mean_a = box_mean(a, radius);
  const ScalarField mean_b = box_mean(b, radius);
  ScalarField q(p.height(), p.width());
  for (std::size_t i = 0; i < n; ++i) q[i] = mean_a[i] * guide[i] + mean_b[i];
  return q;
}

ImagePlane guided_filter(const ImagePlane& img, const ImagePlane& guide, int radius, double eps) {
  if (img.height() != guide.height() || img.width() != guide.width())
    throw InvalidInput("guided_filter: img and guide differ in size");
  if (radius < 1) throw InvalidInput("guided_filter: radius must be >= 1");
  if (!(eps > 0.0)) throw InvalidInput("guided_filter: eps must be > 0");
  const ScalarField g = field_from_channel(to_gray(guide), 0);
  ImagePlane out(img.height(), img.width(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const ScalarField q = guided_filter_field(field_from_channel(img, c), g, radius, eps);
    std::copy(q.data().begin(), q.data().end(), out.channel(c).begin());
  }
  out.clip();
  return out;
}

namespace {

ImagePlane rot90(const ImagePlane& in) {
  const int h = in.height(), w = in.width();
  ImagePlane out(w, h, in.channels());
  for (int c = 0; c < in.channels(); ++c)
    for (int y = 0; y < w; ++y)
      for (int x = 0; x < h; ++x) out.at(c, y, x) = in.at(c, x, w - 1 - y);
  return out;
}

ImagePlane fliplr(const ImagePlane& in) {
  ImagePlane out(in.height(), in.width(), in.channels());
  for (int c = 0; c < in.channels(); ++c)
    for (int y = 0; y < in.height(); ++y)
      for (int x = 0; x < in.width(); ++x) out.at(c, y, x) = in.at(c, y, in.width() - 1 - x);
  return out;
}

ImagePlane rotate(ImagePlane img, int quarter_turns) {
  for (int i = 0; i < ((quarter_turns % 4) + 4) % 4; ++i) img = rot90(img);
  return img;
}

}  // namespace

ImagePlane dihedral(const ImagePlane& img, int k) {
  if (k < 0 || k >= 8) throw InvalidInput("dihedral: index must be in [0,8)");
  return k < 4 ? rotate(img, k) : rotate(fliplr(img), k - 4);
}

ImagePlane inverse_dihedral(const ImagePlane& img, int k) {
  if (k < 0 || k >= 8) throw InvalidInput("inverse_dihedral: index must be in [0,8)");
  return k < 4 ? rotate(img, 4 - k) : fliplr(rotate(img, 4 - (k - 4)));
}

std::array<ImagePlane, 8> augment8(const ImagePlane& img) {
  std::array<ImagePlane, 8> out;
  for (int k = 0; k < 8; ++k) out[k] = dihedral(img, k);
  return out;
}

std::array<ImagePlane, 8> inverse_augment8(const std::array<ImagePlane, 8>& imgs) {
  std::array<ImagePlane, 8> out;
  for (int k = 0; k < 8; ++k) out[k] = inverse_dihedral(imgs[k], k);
  return out;
}

ImagePlane fuse_augmented(const std::array<ImagePlane, 8>& outputs) {
  const auto back = inverse_augment8(outputs);
  ImagePlane acc(back[0].height(), back[0].width(), back[0].channels());
  for (const auto& img : back) {
    require_same_shape(acc, img, "fuse_augmented");
    for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += img.data()[i];
  }
  for (double& v : acc.data()) v /= 8.0;
  return acc;
}

ScalarField resize_bilinear(const ScalarField& in, int height, int width) {
  ScalarField out(height, width);
  const double sy = static_cast<double>(in.height()) / height;
  const double sx = static_cast<double>(in.width()) / width;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(in.height() - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, in.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(in.width() - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, in.width() - 1);
      const double tx = fx - x0;
      const double top = in.at(y0, x0) * (1 - tx) + in.at(y0, x1) * tx;
      const double bot = in.at(y1, x0) * (1 - tx) + in.at(y1, x1) * tx;
      out.at(y, x) = top * (1 - ty) + bot * ty;
    }
  }
  return out;
}

ScalarField resize_area(const ScalarField& in, int height, int width) {
  if (height > in.height() || width > in.width()) return resize_bilinear(in, height, width);
  ScalarField out(height, width);
  const double sy = static_cast<double>(in.height()) / height;
  const double sx = static_cast<double>(in.width()) / width;
  for (int y = 0; y < height; ++y) {
    const double ya = y * sy, yb = (y + 1) * sy;
    for (int x = 0; x < width; ++x) {
      const double xa = x * sx, xb = (x + 1) * sx;
      double acc = 0.0, area = 0.0;
      for (int iy = static_cast<int>(ya); iy < std::min(in.height(), static_cast<int>(std::ceil(yb))); ++iy) {
        const double wy = std::min<double>(iy + 1, yb) - std::max<double>(iy, ya);
        if (wy <= 0) continue;
        for (int ix = static_cast<int>(xa); ix < std::min(in.width(), static_cast<int>(std::ceil(xb))); ++ix) {
          const double wx = std::min<double>(ix + 1, xb) - std::max<double>(ix, xa);
          if (wx <= 0) continue;
          acc += wy * wx * in.at(iy, ix);
          area += wy * wx;
        }
      }
      out.at(y, x) = acc / area;
    }
  }
  return out;
}

}  // namespace pixelrl
