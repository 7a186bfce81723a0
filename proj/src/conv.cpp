#include "pixelrl/conv.hpp"

#include <Eigen/Core>

#include <algorithm>

#include "pixelrl/error.hpp"

namespace pixelrl {

namespace {

// Eigen picks vectorized code paths from operand alignment, which for
// std::vector storage varies between runs and changes rounding. Every
// product therefore runs on Eigen-owned (aligned) copies.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;

void check(const Tensor& x, std::span<const double> w, std::span<const double> b, const ConvShape& s) {
  if (x.c != s.in) throw InvalidInput("conv: input has " + std::to_string(x.c) + " channels, layer expects " +
                                      std::to_string(s.in));
  if (w.size() != s.weight_count() || b.size() != static_cast<std::size_t>(s.out))
    throw InvalidInput("conv: parameter size mismatch");
  if (s.k % 2 == 0 || s.k < 1 || s.dilation < 1) throw InvalidInput("conv: kernel must be odd and dilation >= 1");
}

// Row r = (i*k + ky)*k + kx of the column matrix holds x(i, y+oy, x+ox) for every output pixel.
void im2col(const Tensor& x, const ConvShape& s, RowMat& col) {
  const int k = s.k, h = x.h, w = x.w;
  const std::size_t n = x.plane();
  const int rows = s.in * k * k;
  col.setZero(rows, static_cast<Eigen::Index>(n));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const int i = r / (k * k), ky = (r / k) % k, kx = r % k;
    const int oy = (ky - k / 2) * s.dilation, ox = (kx - k / 2) * s.dilation;
    double* dst = col.data() + static_cast<std::size_t>(r) * n;
    const double* src = x.channel(i);
    for (int y = std::max(0, -oy); y < std::min(h, h - oy); ++y)
      for (int xx = std::max(0, -ox); xx < std::min(w, w - ox); ++xx)
        dst[static_cast<std::size_t>(y) * w + xx] = src[static_cast<std::size_t>(y + oy) * w + xx + ox];
  }
}

void col2im(const RowMat& col, const ConvShape& s, Tensor& dx) {
  const int k = s.k, h = dx.h, w = dx.w;
  const std::size_t n = dx.plane();
  std::fill(dx.data.begin(), dx.data.end(), 0.0);
  // One thread per input channel keeps the accumulation order fixed.
#pragma omp parallel for schedule(static)
  for (int i = 0; i < s.in; ++i) {
    double* dst = dx.channel(i);
    for (int t = 0; t < k * k; ++t) {
      const int ky = t / k, kx = t % k;
      const int oy = (ky - k / 2) * s.dilation, ox = (kx - k / 2) * s.dilation;
      const double* src = col.data() + (static_cast<std::size_t>(i) * k * k + t) * n;
      for (int y = std::max(0, -oy); y < std::min(h, h - oy); ++y)
        for (int xx = std::max(0, -ox); xx < std::min(w, w - ox); ++xx)
          dst[static_cast<std::size_t>(y + oy) * w + xx + ox] += src[static_cast<std::size_t>(y) * w + xx];
    }
  }
}

void forward_serial(const Tensor& x, std::span<const double> W, std::span<const double> b, const ConvShape& s,
                    Tensor& y) {
  const int k = s.k;
  for (int o = 0; o < s.out; ++o)
    for (int yy = 0; yy < x.h; ++yy)
      for (int xx = 0; xx < x.w; ++xx) {
        double acc = b[o];
        for (int i = 0; i < s.in; ++i)
          for (int ky = 0; ky < k; ++ky) {
            const int iy = yy + (ky - k / 2) * s.dilation;
            if (iy < 0 || iy >= x.h) continue;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = xx + (kx - k / 2) * s.dilation;
              if (ix < 0 || ix >= x.w) continue;
              acc += W[((static_cast<std::size_t>(o) * s.in + i) * k + ky) * k + kx] * x.at(i, iy, ix);
            }
          }
        y.at(o, yy, xx) = acc;
      }
}

void backward_serial(const Tensor& x, std::span<const double> W, const Tensor& dy, const ConvShape& s, Tensor* dx,
                     std::span<double> dW, std::span<double> db) {
  const int k = s.k;
  if (dx) *dx = Tensor(s.in, x.h, x.w);
  for (int o = 0; o < s.out; ++o)
    for (int yy = 0; yy < x.h; ++yy)
      for (int xx = 0; xx < x.w; ++xx) {
        const double g = dy.at(o, yy, xx);
        db[o] += g;
        for (int i = 0; i < s.in; ++i)
          for (int ky = 0; ky < k; ++ky) {
            const int iy = yy + (ky - k / 2) * s.dilation;
            if (iy < 0 || iy >= x.h) continue;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = xx + (kx - k / 2) * s.dilation;
              if (ix < 0 || ix >= x.w) continue;
              const std::size_t wi = ((static_cast<std::size_t>(o) * s.in + i) * k + ky) * k + kx;
              dW[wi] += g * x.at(i, iy, ix);
              if (dx) dx->at(i, iy, ix) += W[wi] * g;
            }
          }
      }
}

}  // namespace

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.h != b.h || a.w != b.w) throw InvalidInput("concat_channels: spatial size mismatch");
  Tensor out(a.c + b.c, a.h, a.w);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

void conv_forward(const Tensor& x, std::span<const double> weights, std::span<const double> bias, const ConvShape& s,
                  Tensor& y, Backend backend) {
  check(x, weights, bias, s);
  if (!(y.c == s.out && y.h == x.h && y.w == x.w)) y = Tensor(s.out, x.h, x.w);
  if (backend == Backend::Serial) {
    forward_serial(x, weights, bias, s, y);
    return;
  }
  const auto n = static_cast<Eigen::Index>(x.plane());
  const Eigen::Index kk = static_cast<Eigen::Index>(s.in) * s.k * s.k;
  const RowMat W = ConstMap(weights.data(), s.out, kk);
  RowMat X;
  if (s.k == 1)
    X = ConstMap(x.data.data(), kk, n);
  else
    im2col(x, s, X);
  const RowMat Y = W * X;
  std::copy(Y.data(), Y.data() + Y.size(), y.data.begin());
  for (int o = 0; o < s.out; ++o) {
    double* row = y.channel(o);
    for (Eigen::Index i = 0; i < n; ++i) row[i] += bias[o];
  }
}

void conv_backward(const Tensor& x, std::span<const double> weights, const Tensor& dy, const ConvShape& s,
                   Tensor* dx, std::span<double> dweights, std::span<double> dbias, Backend backend) {
  check(x, weights, std::span<const double>(dbias.data(), dbias.size()), s);
  if (dweights.size() != s.weight_count()) throw InvalidInput("conv_backward: gradient size mismatch");
  if (!(dy.c == s.out && dy.h == x.h && dy.w == x.w)) throw InvalidInput("conv_backward: dy shape mismatch");
  if (backend == Backend::Serial) {
    backward_serial(x, weights, dy, s, dx, dweights, dbias);
    return;
  }
  const auto n = static_cast<Eigen::Index>(x.plane());
  const Eigen::Index kk = static_cast<Eigen::Index>(s.in) * s.k * s.k;
  for (int o = 0; o < s.out; ++o) {
    const double* row = dy.channel(o);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += row[i];
    dbias[o] += acc;
  }
  const RowMat W = ConstMap(weights.data(), s.out, kk);
  const RowMat dY = ConstMap(dy.data.data(), s.out, n);
  RowMat X;
  if (s.k == 1)
    X = ConstMap(x.data.data(), kk, n);
  else
    im2col(x, s, X);
  const RowMat dW = dY * X.transpose();
  for (Eigen::Index i = 0; i < dW.size(); ++i) dweights[i] += dW.data()[i];
  if (!dx) return;
  const RowMat dcol = W.transpose() * dY;
  *dx = Tensor(s.in, x.h, x.w);
  if (s.k == 1)
    std::copy(dcol.data(), dcol.data() + dcol.size(), dx->data.begin());
  else
    col2im(dcol, s, *dx);
}

}  // namespace pixelrl
