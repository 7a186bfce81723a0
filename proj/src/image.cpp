#include "pixelrl/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pixelrl {

ImagePlane::ImagePlane(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1) throw InvalidInput("ImagePlane: height and width must be >= 1");
  if (channels != 1 && channels != 3 && channels != 4)
    throw InvalidInput("ImagePlane: channels must be 1, 3 or 4, got " + std::to_string(channels));
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

void ImagePlane::clip() {
  for (double& v : data_) {
    if (!(v > 0.0)) v = 0.0;  // also maps NaN to 0
    else if (v > 1.0) v = 1.0;
  }
}

ImagePlane ImagePlane::extract_channel(int c) const {
  if (c < 0 || c >= channels_) throw InvalidInput("extract_channel: channel out of range");
  ImagePlane out(height_, width_, 1);
  auto src = channel(c);
  std::copy(src.begin(), src.end(), out.data().begin());
  return out;
}

ImagePlane ImagePlane::crop(int y0, int x0, int h, int w) const {
  if (y0 < 0 || x0 < 0 || h < 1 || w < 1 || y0 + h > height_ || x0 + w > width_)
    throw InvalidInput("crop: rectangle outside image");
  ImagePlane out(h, w, channels_);
  for (int c = 0; c < channels_; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = at(c, y0 + y, x0 + x);
  return out;
}

ScalarField::ScalarField(int height, int width, double fill) : height_(height), width_(width) {
  if (height < 1 || width < 1) throw InvalidInput("ScalarField: height and width must be >= 1");
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

bool ScalarField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::mean() const {
  if (data_.empty()) return 0.0;
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what) {
  if (!a.same_shape(b)) throw InvalidInput(std::string(what) + ": shape mismatch");
}

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!a.same_shape(b)) throw InvalidInput(std::string(what) + ": shape mismatch");
}

ImagePlane to_gray(const ImagePlane& img) {
  if (img.channels() == 1) return img;
  ImagePlane out(img.height(), img.width(), 1);
  auto r = img.channel(0), g = img.channel(1), b = img.channel(2);
  auto o = out.channel(0);
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

}  // namespace pixelrl
