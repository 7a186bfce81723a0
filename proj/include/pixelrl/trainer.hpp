#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pixelrl/checkpoint.hpp"
#include "pixelrl/config.hpp"
#include "pixelrl/env.hpp"
#include "pixelrl/learn.hpp"
#include "pixelrl/network.hpp"

namespace pixelrl {

/// Source images for episode generation.
struct TrainingData {
  Task task = Task::Denoise;
  std::vector<ImagePlane> images;  ///< clean images, color inputs, or saliency images
  std::vector<ImagePlane> targets;  ///< color task only
  std::vector<ImagePlane> masks;    ///< saliency task only
  std::vector<std::string> documents;  ///< restore task only

  /// Throws InvalidInput on an empty set or a task/content mismatch.
  void validate() const;
};

/// Loads the data named by cfg (data_dir, target_dir, documents_dir) or
/// generates the synthetic set when data_dir is empty.
TrainingData load_training_data(const TrainConfig& cfg);

/// Episode start state for one minibatch slot: random image, crop,
/// dihedral augmentation, corruption; deterministic in episode_seed.
EnvState make_episode(const TrainingData& data, const TrainConfig& cfg, std::uint64_t episode_seed);

Architecture architecture_for(const TrainConfig& cfg);
/// Parameters for evaluation rollouts (saliency edits guided-filter smoothed when enabled).
TaskParams task_params_for(const TrainConfig& cfg);
/// Parameters for training rollouts: as task_params_for but never smoothed.
TaskParams training_params_for(const TrainConfig& cfg);

/// Everything the backward pass needs from one sampled episode.
struct RolloutRecord {
  std::vector<StepCache> caches;
  std::vector<Tensor> policies;
  std::vector<Tensor> log_policies;
  std::vector<ActionMap> actions;
  Trajectory trajectory;  ///< rewards, values, log pi(a); terminal (no bootstrap)
};

/// Samples t_max steps of the current policy from start.
RolloutRecord record_rollout(const Network& net, const EnvState& start, const ActionSet& set, const TaskParams& params,
                             std::mt19937_64& rng, Backend backend = Backend::OpenMP);

struct GradientOptions {
  double gamma = 0.95;
  double value_weight = 1.0;
  double entropy_beta = 0.0;
  double scale = 1.0;  ///< 1 / (pixels * steps * minibatch)
  bool bypass_rmc = false;
};

struct EpisodeGradients {
  std::vector<double> network;  ///< d loss / d parameters
  std::vector<double> kernel;   ///< empty unless the kernel is trainable
  Losses losses;
  double r_hat = 0.0;
};

/// Loss per episode: scale * sum over pixels and steps of
///   -log pi(a) * A  (A held constant)  +  value_weight * (R - V)^2  -  entropy_beta * H(pi),
/// with R from the return recursion (a function of the kernel) and V(theta).
EpisodeGradients episode_gradients(const Network& net, const RewardKernel& kernel, const RolloutRecord& rec,
                                   const GradientOptions& opt, Backend backend = Backend::OpenMP);

struct EpisodeMetrics {
  int episode = 0;
  double lr = 0.0;
  double r_hat = 0.0;  ///< minibatch mean of the accumulated reward
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double grad_norm = 0.0;
  double wall_time = 0.0;  ///< seconds since the run started
};

/// Synchronous single-learner actor-critic with reward map convolution.
class Trainer {
 public:
  /// Fresh parameters from cfg.seed; identity reward kernel (trainable in rmc-on).
  explicit Trainer(const TrainConfig& cfg);
  /// Resume. Same phase continues the episode counter; rmc-off -> rmc-on
  /// starts the second phase at episode 0 with the kernel made trainable.
  Trainer(const TrainConfig& cfg, const Checkpoint& from);

  /// One rollout of t_max steps per batch entry and one Adam update.
  EpisodeMetrics train_episode(const std::vector<EnvState>& batch);

  /// Builds the minibatch for the current episode and trains on it.
  EpisodeMetrics train_episode(const TrainingData& data);

  int episode() const { return episode_; }
  const TrainConfig& config() const { return cfg_; }
  const Network& network() const { return net_; }
  Network& network() { return net_; }
  const RewardKernel& kernel() const { return kernel_; }
  const AdamState& network_adam() const { return net_adam_; }
  const AdamState& kernel_adam() const { return kernel_adam_; }
  void set_backend(Backend b) { backend_ = b; }

  Checkpoint checkpoint() const;

 private:
  TrainConfig cfg_;
  ActionSet actions_;
  TaskParams params_;
  Network net_;
  RewardKernel kernel_;
  AdamState net_adam_, kernel_adam_;
  int episode_ = 0;
  Backend backend_ = Backend::OpenMP;
  double start_time_ = 0.0;
};

inline constexpr const char* kMetricsSchema = "#schema=pixelrl.metrics.v1";
inline constexpr const char* kMetricsHeader = "episode,lr,r_hat,policy_loss,value_loss,wall_time";
std::string metrics_row(const EpisodeMetrics& m);

struct TrainRun {
  Checkpoint final_checkpoint;
  std::vector<EpisodeMetrics> metrics;
  std::vector<std::filesystem::path> checkpoints;
};

/// Runs episodes until cfg.max_episode. With out_dir, writes metrics.csv and
/// a checkpoint every cfg.checkpoint_every episodes plus the final one.
TrainRun run_training(const TrainConfig& cfg, const TrainingData& data, const std::optional<Checkpoint>& resume,
                      const std::optional<std::filesystem::path>& out_dir,
                      const std::function<void(const EpisodeMetrics&)>& on_episode = {});

/// Trains on a single image/mask pair (minibatch 1) and returns the greedy
/// edit of that image together with the training metrics.
struct SaliencyEdit {
  ImagePlane edited;
  std::vector<EpisodeMetrics> metrics;
};
SaliencyEdit saliency_edit(const ImagePlane& image, const ImagePlane& mask, const TrainConfig& cfg);

}  // namespace pixelrl
