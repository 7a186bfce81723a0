#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pixelrl/actions.hpp"
#include "pixelrl/conv.hpp"
#include "pixelrl/image.hpp"

namespace pixelrl {

struct LayerSpec {
  int out = 0;
  int k = 3;
  int dilation = 1;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Layer table of the shared-trunk actor-critic. Trunk and head convolutions
/// are followed by ReLU; the policy branch ends in a convolutional GRU, a
/// convolution to one logit per action and a per-pixel softmax; the value
/// branch ends in a single-channel convolution.
struct Architecture {
  int in_channels = 1;
  int actions = 9;
  std::vector<LayerSpec> trunk;
  std::vector<LayerSpec> policy_head;
  std::vector<LayerSpec> value_head;
  int gru_channels = 64;
  int gru_kernel = 3;
  int policy_out_kernel = 1;
  int value_out_kernel = 3;

  /// Dilations 1,2,3,4 trunk; heads with dilations 3,2. Radius 16.
  static Architecture standard(int in_channels, int actions, int width = 64);
  /// Two-layer trunk, one-layer heads. Radius 5 (kernel side 11).
  static Architecture tiny(int in_channels, int actions, int width = 4);

  /// Receptive-field radius of the policy output for a zero hidden state.
  int policy_radius() const;
  int value_radius() const;
  /// Common radius; throws ConfigError when the branches disagree.
  int receptive_radius() const;
  void validate() const;

  std::string to_json() const;
  static Architecture from_json(const std::string& text);

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Throws ConfigError unless 2*radius+1 equals the reward-kernel side.
void validate_receptive_field(const Architecture& arch, int kernel_side);

struct Layer {
  std::string name;
  ConvShape shape;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Parameters live in one flat vector so optimizers and checkpoints can treat
/// them uniformly; `layers()` maps each convolution to its slice.
class Network {
 public:
  Network() = default;
  explicit Network(const Architecture& arch);

  /// He-normal ReLU layers, Glorot-normal GRU, LeCun-normal value output,
  /// zero policy output (uniform initial policy). Update-gate bias +2 so the
  /// GRU initially passes its candidate through.
  static Network init(const Architecture& arch, std::uint64_t seed);

  const Architecture& arch() const { return arch_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  std::span<const double> weights(const Layer& l) const { return {params_.data() + l.weight_offset, l.shape.weight_count()}; }
  std::span<const double> bias(const Layer& l) const { return {params_.data() + l.bias_offset, static_cast<std::size_t>(l.shape.out)}; }

  // Fixed layer positions inside layers().
  std::size_t trunk_begin() const { return 0; }
  std::size_t policy_head_begin() const { return arch_.trunk.size(); }
  std::size_t gru_gates() const { return policy_head_begin() + arch_.policy_head.size(); }
  std::size_t gru_candidate() const { return gru_gates() + 1; }
  std::size_t policy_out() const { return gru_gates() + 2; }
  std::size_t value_head_begin() const { return policy_out() + 1; }
  std::size_t value_out() const { return value_head_begin() + arch_.value_head.size(); }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  Architecture arch_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

/// Activations kept by forward() for backward().
struct StepCache {
  Tensor input;
  std::vector<Tensor> trunk;        ///< outputs of each trunk layer
  std::vector<Tensor> policy_head;  ///< outputs of each policy-head layer
  std::vector<Tensor> value_head;
  Tensor h_prev, xh, z, r, xrh, candidate, hidden;
};

struct PolicyValue {
  Tensor policy;      ///< (actions, H, W), per-pixel softmax
  Tensor log_policy;  ///< log of policy, computed stably
  ScalarField value;
  Tensor hidden;      ///< (gru_channels, H, W)
};

Tensor zero_hidden(const Network& net, int height, int width);

/// One network evaluation. An empty `hidden` means zeros. Throws NumericFault
/// if any output is non-finite.
PolicyValue forward(const Network& net, const ImagePlane& observation, const Tensor& hidden,
                    Backend backend = Backend::OpenMP, StepCache* cache = nullptr);

/// Backward of one step given the loss gradients w.r.t. logits (actions,H,W),
/// value (1,H,W) and the next step's hidden state (gru,H,W; empty = zero).
/// Parameter gradients are accumulated into grad; returns the gradient w.r.t.
/// the previous hidden state.
Tensor backward(const Network& net, const StepCache& cache, const Tensor& dlogits, const Tensor& dvalue,
                const Tensor& dh_next, std::vector<double>& grad, Backend backend = Backend::OpenMP);

enum class SampleMode { Sample, Greedy };

/// Sample: independent categorical draw per pixel. Greedy: per-pixel argmax,
/// lowest index on ties. Throws InvalidInput if some pixel's policy does not
/// sum to 1 within 1e-6.
ActionMap sample_actions(const Tensor& policy, SampleMode mode, std::mt19937_64& rng);

}  // namespace pixelrl
