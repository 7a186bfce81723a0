#pragma once

#include <optional>
#include <vector>

#include "pixelrl/backend.hpp"
#include "pixelrl/image.hpp"
#include "pixelrl/reward_kernel.hpp"

namespace pixelrl {

/// Per-step maps of one episode. A missing bootstrap means the episode ended
/// in a terminal state, so the return beyond the last step is zero.
struct Trajectory {
  std::vector<ScalarField> rewards;
  std::vector<ScalarField> values;
  std::vector<ScalarField> log_probs;  ///< log pi(a_t | s_t) of the taken actions
  std::optional<ScalarField> bootstrap;

  int steps() const { return static_cast<int>(rewards.size()); }
  /// Throws InvalidInput if lengths or shapes disagree.
  void validate() const;
};

/// Return maps with reward map convolution, one per step, by the backward
/// recursion R <- r_k + conv(gamma * R, w) starting from the bootstrap.
std::vector<ScalarField> compute_returns(const std::vector<ScalarField>& rewards,
                                         const std::optional<ScalarField>& bootstrap, const RewardKernel& w,
                                         double gamma, Backend backend = Backend::OpenMP);

/// Plain per-pixel n-step returns (no neighbourhood mixing).
std::vector<ScalarField> scalar_returns(const std::vector<ScalarField>& rewards,
                                        const std::optional<ScalarField>& bootstrap, double gamma);

/// A_k = R_k - V_k.
std::vector<ScalarField> advantages(const std::vector<ScalarField>& returns, const std::vector<ScalarField>& values);

struct Losses {
  double policy = 0.0;  ///< -mean(log pi(a) * A)
  double value = 0.0;   ///< mean((R - V)^2)
};

/// Means over every pixel of every step.
Losses compute_losses(const Trajectory& traj, const std::vector<ScalarField>& returns);

/// dL/dR_k for L = scale * sum(-log pi * A + value_weight * (R - V)^2), with V held fixed.
std::vector<ScalarField> return_gradients(const Trajectory& traj, const std::vector<ScalarField>& returns,
                                          double value_weight, double scale);

/// Gradient of the loss w.r.t. the reward kernel, back-propagated through the
/// return recursion. grads[k] = dL/dR_k. Throws StateError for a frozen kernel.
std::vector<double> kernel_gradient(const std::vector<ScalarField>& returns,
                                    const std::optional<ScalarField>& bootstrap,
                                    const std::vector<ScalarField>& grads, const RewardKernel& w, double gamma,
                                    Backend backend = Backend::OpenMP);

/// (1/N) * sum_i sum_t gamma^t r_i^(t).
double accumulated_reward(const std::vector<ScalarField>& rewards, double gamma);

/// base * (1 - episode/max_episode)^power, for 0 <= episode <= max_episode.
double poly_lr(int episode, int max_episode, double base_lr, double power = 0.9);

struct AdamState {
  std::vector<double> m, v;
  long long step = 0;
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam step (gradient descent direction).
void adam_update(std::vector<double>& params, const std::vector<double>& grad, AdamState& state, double lr,
                 const AdamConfig& cfg = {});

double global_norm(const std::vector<const std::vector<double>*>& grads);
/// Scales all gradients so their joint L2 norm is at most max_norm. Returns the pre-clip norm.
double clip_global_norm(const std::vector<std::vector<double>*>& grads, double max_norm);

}  // namespace pixelrl
