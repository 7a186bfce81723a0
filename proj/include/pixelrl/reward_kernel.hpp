#pragma once

#include <vector>

#include "pixelrl/backend.hpp"
#include "pixelrl/image.hpp"

namespace pixelrl {

/// Learned square weight field used to mix neighbouring return maps.
/// Indexing is weight(dy, dx) with offsets in [-radius, radius].
class RewardKernel {
 public:
  RewardKernel() : RewardKernel(1) {}
  /// Identity kernel (center 1, zero elsewhere) of the given odd side.
  explicit RewardKernel(int side, bool trainable = false);

  static RewardKernel identity(int side) { return RewardKernel(side); }
  static RewardKernel uniform(int side);

  int side() const { return side_; }
  int radius() const { return side_ / 2; }
  bool trainable() const { return trainable_; }
  void set_trainable(bool t) { trainable_ = t; }
  bool is_identity() const;

  double& weight(int dy, int dx) { return w_[(dy + radius()) * side_ + dx + radius()]; }
  double weight(int dy, int dx) const { return w_[(dy + radius()) * side_ + dx + radius()]; }

  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }

  friend bool operator==(const RewardKernel&, const RewardKernel&) = default;

 private:
  int side_;
  bool trainable_;
  std::vector<double> w_;
};

/// Same-size 2D correlation with zero padding:
///   out(y,x) = sum_{dy,dx} w(dy,dx) * in(y+dy, x+dx).
/// An impulse at p therefore stamps the kernel flipped: out(p - d) = w(d).
ScalarField conv2d_return(const ScalarField& map, const RewardKernel& kernel, Backend backend = Backend::OpenMP);

/// Adjoint of conv2d_return in its input: out(y,x) = sum_d w(d) * g(y-d, x-d).
ScalarField conv2d_return_adjoint(const ScalarField& grad, const RewardKernel& kernel,
                                  Backend backend = Backend::OpenMP);

/// Gradient of <grad, conv2d_return(input, w)> with respect to w, added into dw:
///   dw(d) += sum_i grad(i) * input(i + d).
void accumulate_kernel_gradient(const ScalarField& grad, const ScalarField& input, std::vector<double>& dw,
                                int side, Backend backend = Backend::OpenMP);

}  // namespace pixelrl
