#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pixelrl/error.hpp"

namespace pixelrl {

/// Planar image with values in [0,1]. Layout is channel-major: data[(c*H + y)*W + x].
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int height, int width, int channels, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixels() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) { return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x]; }
  double at(int c, int y, int x) const { return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x]; }

  std::span<double> channel(int c) { return {data_.data() + static_cast<std::size_t>(c) * pixels(), pixels()}; }
  std::span<const double> channel(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * pixels(), pixels()};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const ImagePlane& o) const {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
  }

  /// Clamp every element into [0,1]. NaN becomes 0.
  void clip();

  /// Single channel copy.
  ImagePlane extract_channel(int c) const;

  /// Sub-rectangle copy.
  ImagePlane crop(int y0, int x0, int h, int w) const;

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Unbounded real field with the spatial size of an episode image
/// (rewards, returns, values, advantages, saliency).
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int height, int width, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  double& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const ScalarField& o) const { return height_ == o.height_ && width_ == o.width_; }
  bool same_shape(const ImagePlane& img) const { return height_ == img.height() && width_ == img.width(); }

  bool all_finite() const;
  double mean() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what);
void require_same_shape(const ScalarField& a, const ScalarField& b, const char* what);

/// ITU-R BT.601 luma of an RGB image, or a copy of channel 0 for gray input.
ImagePlane to_gray(const ImagePlane& img);

/// Reflect-101 index (abcd|cba...), valid for any n >= 1 and any offset.
inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace pixelrl
