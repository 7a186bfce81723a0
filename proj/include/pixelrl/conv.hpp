#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pixelrl/backend.hpp"

namespace pixelrl {

/// Dense CHW activation tensor.
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int channels, int height, int width, double fill = 0.0)
      : c(channels), h(height), w(width), data(static_cast<std::size_t>(channels) * height * width, fill) {}

  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  std::size_t size() const { return data.size(); }
  double& at(int ch, int y, int x) { return data[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return data[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
  double* channel(int ch) { return data.data() + ch * plane(); }
  const double* channel(int ch) const { return data.data() + ch * plane(); }
  bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Stacks a's channels on top of b's.
Tensor concat_channels(const Tensor& a, const Tensor& b);

/// Square "same" convolution with zero padding of dilation*(k/2).
/// Weights are laid out [out][in][ky][kx], one bias per output channel.
struct ConvShape {
  int in = 0, out = 0, k = 1, dilation = 1;

  int radius() const { return dilation * (k / 2); }
  std::size_t weight_count() const { return static_cast<std::size_t>(out) * in * k * k; }
  friend bool operator==(const ConvShape&, const ConvShape&) = default;
};

/// y = conv(x) + b. y is resized to (out, h, w).
/// Serial uses direct loops; OpenMP uses im2col and a dense matrix product.
void conv_forward(const Tensor& x, std::span<const double> weights, std::span<const double> bias, const ConvShape& s,
                  Tensor& y, Backend backend = Backend::OpenMP);

/// Backward pass of conv_forward. dW and db are accumulated into; dx (if
/// non-null) is overwritten with the input gradient.
void conv_backward(const Tensor& x, std::span<const double> weights, const Tensor& dy, const ConvShape& s,
                   Tensor* dx, std::span<double> dweights, std::span<double> dbias, Backend backend = Backend::OpenMP);

}  // namespace pixelrl
