#include "pixelrl/reward_kernel.hpp"

#include <algorithm>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pixelrl {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

RewardKernel::RewardKernel(int side, bool trainable) : side_(side), trainable_(trainable) {
  if (side < 1 || side % 2 == 0) throw InvalidInput("RewardKernel: side must be odd and >= 1, got " + std::to_string(side));
  w_.assign(static_cast<std::size_t>(side) * side, 0.0);
  w_[w_.size() / 2] = 1.0;
}

RewardKernel RewardKernel::uniform(int side) {
  RewardKernel k(side);
  std::fill(k.w_.begin(), k.w_.end(), 1.0 / (static_cast<double>(side) * side));
  return k;
}

bool RewardKernel::is_identity() const {
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] != (i == w_.size() / 2 ? 1.0 : 0.0)) return false;
  return true;
}

namespace {

// One output row of the zero-padded correlation. Zero weights are skipped;
// they would only add signed zeros.
void correlate_row(const ScalarField& in, const RewardKernel& k, ScalarField& out, int y, int sign) {
  const int h = in.height(), w = in.width(), r = k.radius();
  for (int x = 0; x < w; ++x) {
    double acc = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
      const int sy = y + sign * dy;
      if (sy < 0 || sy >= h) continue;
      for (int dx = -r; dx <= r; ++dx) {
        const int sx = x + sign * dx;
        if (sx < 0 || sx >= w) continue;
        const double wt = k.weight(dy, dx);
        if (wt != 0.0) acc += wt * in.at(sy, sx);
      }
    }
    out.at(y, x) = acc;
  }
}

ScalarField correlate(const ScalarField& in, const RewardKernel& k, Backend backend, int sign) {
  ScalarField out(in.height(), in.width());
  const int h = in.height();
  if (backend == Backend::Serial) {
    for (int y = 0; y < h; ++y) correlate_row(in, k, out, y, sign);
  } else {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) correlate_row(in, k, out, y, sign);
  }
  return out;
}

}  // namespace

ScalarField conv2d_return(const ScalarField& map, const RewardKernel& kernel, Backend backend) {
  return correlate(map, kernel, backend, +1);
}

ScalarField conv2d_return_adjoint(const ScalarField& grad, const RewardKernel& kernel, Backend backend) {
  return correlate(grad, kernel, backend, -1);
}

void accumulate_kernel_gradient(const ScalarField& grad, const ScalarField& input, std::vector<double>& dw, int side,
                                Backend backend) {
  require_same_shape(grad, input, "accumulate_kernel_gradient");
  if (side < 1 || side % 2 == 0) throw InvalidInput("accumulate_kernel_gradient: side must be odd");
  if (dw.size() != static_cast<std::size_t>(side) * side) throw InvalidInput("accumulate_kernel_gradient: dw size");
  const int h = grad.height(), w = grad.width(), r = side / 2;
  auto tap = [&](int t) {
    const int dy = t / side - r, dx = t % side - r;
    double acc = 0.0;
    for (int y = std::max(0, -dy); y < std::min(h, h - dy); ++y)
      for (int x = std::max(0, -dx); x < std::min(w, w - dx); ++x) acc += grad.at(y, x) * input.at(y + dy, x + dx);
    dw[t] += acc;
  };
  const int taps = side * side;
  if (backend == Backend::Serial) {
    for (int t = 0; t < taps; ++t) tap(t);
  } else {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < taps; ++t) tap(t);
  }
}

}  // namespace pixelrl
