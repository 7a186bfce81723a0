#include "pixelrl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>

#include "pixelrl/dataset.hpp"
#include "pixelrl/eval.hpp"
#include "pixelrl/png_io.hpp"
#include "pixelrl/synth.hpp"

namespace pixelrl {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Stream tags keep the independent random streams of one run apart.
constexpr std::uint64_t kInitStream = 0x1a17;
constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kPhaseOneStream = 0x0b0e;
constexpr std::uint64_t kPhaseTwoStream = 0x0b1f;

ScalarField gather(const Tensor& t, const ActionMap& amap) {
  ScalarField out(t.h, t.w);
  const std::size_t n = t.plane();
  for (std::size_t p = 0; p < n; ++p) out[p] = t.data[amap.ids[p] * n + p];
  return out;
}

}  // namespace

void TrainingData::validate() const {
  if (images.empty()) throw InvalidInput("training data: no images");
  const int ch = image_channels_for(task);
  for (const auto& im : images)
    if (im.channels() != ch) throw InvalidInput("training data: task " + to_string(task) + " needs " + std::to_string(ch) + "-channel images");
  if ((task == Task::Color) != !targets.empty() || (task == Task::Color && targets.size() != images.size()))
    throw InvalidInput("training data: color targets must match inputs one to one (and exist only for color)");
  if ((task == Task::Saliency) != !masks.empty() || (task == Task::Saliency && masks.size() != images.size()))
    throw InvalidInput("training data: saliency masks must match images one to one (and exist only for saliency)");
  if (task == Task::Restore && documents.empty()) throw InvalidInput("training data: restore task needs documents");
}

TrainingData load_training_data(const TrainConfig& cfg) {
  TrainingData d;
  d.task = cfg.task;
  const std::uint64_t seed = mix_seed(cfg.seed, kDataStream);
  const int n = cfg.synth_count, s = cfg.synth_size;
  switch (cfg.task) {
    case Task::Denoise:
    case Task::Restore:
      d.images = cfg.data_dir.empty() ? synthetic_images(n, s, s, 1, seed) : load_images(cfg.data_dir, 1);
      if (cfg.task == Task::Restore)
        d.documents = load_documents(cfg.documents_dir.empty() ? std::nullopt : std::optional<fs::path>(cfg.documents_dir));
      break;
    case Task::Color:
      if (!cfg.target_dir.empty()) {
        if (cfg.data_dir.empty()) throw ConfigError("target_dir needs data_dir");
        for (auto& [a, b] : load_pairs(cfg.data_dir, cfg.target_dir)) {
          d.images.push_back(std::move(a));
          d.targets.push_back(std::move(b));
        }
      } else {
        d.images = cfg.data_dir.empty() ? synthetic_images(n, s, s, 3, seed) : load_images(cfg.data_dir, 3);
        for (const auto& im : d.images) d.targets.push_back(apply_color_style(im, cfg.color_style));
      }
      break;
    case Task::Saliency:
      if (cfg.data_dir.empty()) {
        for (int i = 0; i < n; ++i) {
          auto p = synth_saliency_pair(s, s, mix_seed(seed, i));
          d.images.push_back(std::move(p.image));
          d.masks.push_back(std::move(p.mask));
        }
      } else {
        const fs::path root(cfg.data_dir);
        for (const auto& f : list_pngs(root / "images")) {
          d.images.push_back(read_png(f, 3));
          d.masks.push_back(read_png(root / "masks" / f.filename(), 1));
        }
      }
      break;
  }
  d.validate();
  return d;
}

EnvState make_episode(const TrainingData& data, const TrainConfig& cfg, std::uint64_t episode_seed) {
  std::mt19937_64 rng(episode_seed);
  const auto idx = std::uniform_int_distribution<std::size_t>(0, data.images.size() - 1)(rng);
  switch (data.task) {
    case Task::Denoise: {
      ImagePlane clean = random_crop(data.images[idx], cfg.crop, cfg.crop, cfg.augment, rng);
      ImagePlane noisy = add_noise(clean, cfg.noise, cfg.noise_level, rng());
      return EnvState::start(Task::Denoise, std::move(noisy), std::move(clean), std::nullopt, cfg.t_max);
    }
    case Task::Restore: {
      ImagePlane clean = random_crop(data.images[idx], cfg.crop, cfg.crop, cfg.augment, rng);
      const auto doc = std::uniform_int_distribution<std::size_t>(0, data.documents.size() - 1)(rng);
      TextOverlay ov = overlay_text(clean, data.documents[doc], rng());
      return EnvState::start(Task::Restore, std::move(ov.image), std::move(clean), std::nullopt, cfg.t_max);
    }
    case Task::Color: {
      auto [in, target] = random_crop_pair(data.images[idx], data.targets[idx], cfg.crop, cfg.crop, cfg.augment, rng);
      return EnvState::start(Task::Color, std::move(in), std::move(target), std::nullopt, cfg.t_max);
    }
    case Task::Saliency: {
      auto [img, mask] = random_crop_pair(data.images[idx], data.masks[idx], cfg.crop, cfg.crop, cfg.augment, rng);
      return EnvState::start(Task::Saliency, std::move(img), std::nullopt, std::move(mask), cfg.t_max);
    }
  }
  throw InvalidInput("make_episode: bad task");
}

Architecture architecture_for(const TrainConfig& cfg) {
  const int in = observation_channels(cfg.task);
  const int actions = ActionSet::build(action_domain_for(cfg.task)).size();
  return cfg.arch == "tiny" ? Architecture::tiny(in, actions, cfg.width) : Architecture::standard(in, actions, cfg.width);
}

TaskParams task_params_for(const TrainConfig& cfg) {
  TaskParams p;
  p.estimator.method = cfg.saliency_method;
  p.alpha = cfg.saliency_alpha;
  p.beta = cfg.saliency_beta;
  p.guided_radius = cfg.guided_radius;
  p.guided_eps = cfg.guided_eps;
  p.guided_smoothing = cfg.guided_smoothing;
  return p;
}

TaskParams training_params_for(const TrainConfig& cfg) {
  TaskParams p = task_params_for(cfg);
  // Smoothing spreads each pixel's edit over its neighbours and would hide
  // the effect of a pixel's own action from its reward; it is a test-time step.
  p.guided_smoothing = false;
  return p;
}

// ---- trainer --------------------------------------------------------------

Trainer::Trainer(const TrainConfig& cfg)
    : cfg_(cfg),
      actions_(ActionSet::build(action_domain_for(cfg.task))),
      params_(training_params_for(cfg)),
      kernel_(cfg.kernel_side, cfg.phase == Phase::RmcOn),
      start_time_(now_seconds()) {
  validate(cfg_);
  const Architecture arch = architecture_for(cfg_);
  validate_receptive_field(arch, cfg_.kernel_side);
  net_ = Network::init(arch, mix_seed(cfg_.seed, kInitStream));
}

Trainer::Trainer(const TrainConfig& cfg, const Checkpoint& from)
    : cfg_(cfg),
      actions_(ActionSet::build(action_domain_for(cfg.task))),
      params_(training_params_for(cfg)),
      net_(from.network),
      kernel_(from.kernel),
      net_adam_(from.network_adam),
      kernel_adam_(from.kernel_adam),
      start_time_(now_seconds()) {
  validate(cfg_);
  if (!(from.network.arch() == architecture_for(cfg_)))
    throw ConfigError("resume: checkpoint architecture does not match the configuration");
  if (from.kernel.side() != cfg_.kernel_side) throw ConfigError("resume: checkpoint kernel side differs from kernel_side");
  validate_receptive_field(net_.arch(), cfg_.kernel_side);
  if (from.phase == cfg_.phase) {
    episode_ = from.episode;
  } else if (from.phase == Phase::RmcOff && cfg_.phase == Phase::RmcOn) {
    episode_ = 0;
    kernel_adam_ = AdamState{};
  } else {
    throw ConfigError("resume: cannot go back from rmc-on to rmc-off");
  }
  if (!(from.kernel.is_identity() || cfg_.phase == Phase::RmcOn))
    throw StateError("resume: rmc-off phase requires an identity reward kernel");
  kernel_.set_trainable(cfg_.phase == Phase::RmcOn);
  if (episode_ > cfg_.max_episode) throw ConfigError("resume: checkpoint episode exceeds max_episode");
}

Checkpoint Trainer::checkpoint() const {
  return Checkpoint{net_, kernel_, net_adam_, kernel_adam_, episode_, cfg_.phase, config_to_text(cfg_)};
}

RolloutRecord record_rollout(const Network& net, const EnvState& start, const ActionSet& set, const TaskParams& params,
                             std::mt19937_64& rng, Backend backend) {
  const int T = start.t_max - start.t;
  RolloutRecord rec;
  rec.caches.resize(T);
  EnvState state = start;
  Tensor hidden;
  for (int t = 0; t < T; ++t) {
    PolicyValue pv = forward(net, observation(state), hidden, backend, &rec.caches[t]);
    ActionMap amap = sample_actions(pv.policy, SampleMode::Sample, rng);
    StepResult res = step(state, amap, set, params, backend);
    rec.trajectory.rewards.push_back(std::move(res.reward));
    rec.trajectory.values.push_back(std::move(pv.value));
    rec.trajectory.log_probs.push_back(gather(pv.log_policy, amap));
    rec.policies.push_back(std::move(pv.policy));
    rec.log_policies.push_back(std::move(pv.log_policy));
    rec.actions.push_back(std::move(amap));
    hidden = std::move(pv.hidden);
    state = std::move(res.state);
  }
  return rec;
}

EpisodeGradients episode_gradients(const Network& net, const RewardKernel& kernel, const RolloutRecord& rec,
                                   const GradientOptions& opt, Backend backend) {
  const Trajectory& traj = rec.trajectory;
  traj.validate();
  const int T = traj.steps();
  if (static_cast<int>(rec.caches.size()) != T || static_cast<int>(rec.policies.size()) != T ||
      static_cast<int>(rec.actions.size()) != T)
    throw InvalidInput("episode_gradients: record lengths differ");
  // Episodes always end at t_max, which is terminal: no bootstrap value.
  const std::vector<ScalarField> returns =
      opt.bypass_rmc ? scalar_returns(traj.rewards, std::nullopt, opt.gamma)
                     : compute_returns(traj.rewards, std::nullopt, kernel, opt.gamma, backend);

  EpisodeGradients out;
  out.network.assign(net.param_count(), 0.0);
  const int A = net.arch().actions;
  const double scale = opt.scale, cv = opt.value_weight, beta = opt.entropy_beta;
  Tensor dh;
  for (int t = T - 1; t >= 0; --t) {
    const Tensor& pi = rec.policies[t];
    const Tensor& logpi = rec.log_policies[t];
    const std::size_t n = pi.plane();
    Tensor dlogits(A, pi.h, pi.w), dvalue(1, pi.h, pi.w);
    for (std::size_t p = 0; p < n; ++p) {
      const double adv = returns[t][p] - traj.values[t][p];
      const int chosen = rec.actions[t].ids[p];
      double entropy = 0.0;
      if (beta > 0.0)
        for (int a = 0; a < A; ++a) entropy -= pi.data[a * n + p] * logpi.data[a * n + p];
      for (int a = 0; a < A; ++a) {
        const double prob = pi.data[a * n + p];
        double d = scale * -adv * ((a == chosen ? 1.0 : 0.0) - prob);
        if (beta > 0.0) d += scale * beta * prob * (logpi.data[a * n + p] + entropy);
        dlogits.data[a * n + p] = d;
      }
      dvalue.data[p] = scale * -2.0 * cv * adv;
    }
    dh = backward(net, rec.caches[t], dlogits, dvalue, dh, out.network, backend);
  }
  if (kernel.trainable() && !opt.bypass_rmc) {
    const auto g = return_gradients(traj, returns, cv, scale);
    out.kernel = kernel_gradient(returns, std::nullopt, g, kernel, opt.gamma, backend);
  }
  out.losses = compute_losses(traj, returns);
  out.r_hat = accumulated_reward(traj.rewards, opt.gamma);
  return out;
}

EpisodeMetrics Trainer::train_episode(const std::vector<EnvState>& batch) {
  if (batch.empty()) throw InvalidInput("train_episode: empty minibatch");
  if (episode_ >= cfg_.max_episode) throw StateError("train_episode: max_episode reached");
  for (const auto& s : batch)
    if (s.task != cfg_.task || s.t != 0 || s.t_max != cfg_.t_max)
      throw InvalidInput("train_episode: batch entries must be fresh " + to_string(cfg_.task) + " episodes with t_max " +
                         std::to_string(cfg_.t_max));
  const double lr = poly_lr(episode_, cfg_.max_episode, cfg_.base_lr, cfg_.lr_power);
  const std::uint64_t stream = mix_seed(cfg_.seed, cfg_.phase == Phase::RmcOff ? kPhaseOneStream : kPhaseTwoStream);
  const auto B = static_cast<std::ptrdiff_t>(batch.size());
  std::vector<EpisodeGradients> results(batch.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < B; ++b) {
    try {
      GradientOptions opt{cfg_.gamma, cfg_.value_loss_weight, cfg_.entropy_beta,
                          1.0 / (static_cast<double>(batch[b].current.pixels()) * cfg_.t_max * B), cfg_.bypass_rmc};
      std::mt19937_64 rng(mix_seed(stream, static_cast<std::uint64_t>(episode_), 2 * b + 1));
      const RolloutRecord rec = record_rollout(net_, batch[b], actions_, params_, rng, backend_);
      results[b] = episode_gradients(net_, kernel_, rec, opt, backend_);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  // Fixed reduction order: results do not depend on the thread count.
  std::vector<double> grad(net_.param_count(), 0.0), dw(kernel_.weights().size(), 0.0);
  EpisodeMetrics m;
  m.episode = episode_;
  m.lr = lr;
  for (const auto& r : results) {
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += r.network[i];
    if (!r.kernel.empty())
      for (std::size_t i = 0; i < dw.size(); ++i) dw[i] += r.kernel[i];
    m.r_hat += r.r_hat;
    m.policy_loss += r.losses.policy;
    m.value_loss += r.losses.value;
  }
  m.r_hat /= static_cast<double>(B);
  m.policy_loss /= static_cast<double>(B);
  m.value_loss /= static_cast<double>(B);

  std::vector<std::vector<double>*> all{&grad};
  if (kernel_.trainable()) all.push_back(&dw);
  m.grad_norm = clip_global_norm(all, cfg_.grad_clip);
  if (!std::isfinite(m.grad_norm))
    throw NumericFault("train_episode: non-finite gradient at episode " + std::to_string(episode_) +
                       " (r_hat " + std::to_string(m.r_hat) + ", value loss " + std::to_string(m.value_loss) + ")");
  adam_update(net_.params(), grad, net_adam_, lr);
  if (kernel_.trainable()) adam_update(kernel_.weights(), dw, kernel_adam_, lr);
  ++episode_;
  m.wall_time = now_seconds() - start_time_;
  return m;
}

EpisodeMetrics Trainer::train_episode(const TrainingData& data) {
  if (data.task != cfg_.task) throw InvalidInput("train_episode: data task does not match config");
  const std::uint64_t stream = mix_seed(cfg_.seed, cfg_.phase == Phase::RmcOff ? kPhaseOneStream : kPhaseTwoStream);
  std::vector<EnvState> batch;
  batch.reserve(cfg_.minibatch);
  for (int b = 0; b < cfg_.minibatch; ++b)
    batch.push_back(make_episode(data, cfg_, mix_seed(stream, static_cast<std::uint64_t>(episode_), 2 * b)));
  return train_episode(batch);
}

std::string metrics_row(const EpisodeMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.12g,%.17g,%.17g,%.17g,%.3f", m.episode, m.lr, m.r_hat, m.policy_loss,
                m.value_loss, m.wall_time);
  return buf;
}

TrainRun run_training(const TrainConfig& cfg, const TrainingData& data, const std::optional<Checkpoint>& resume,
                      const std::optional<std::filesystem::path>& out_dir,
                      const std::function<void(const EpisodeMetrics&)>& on_episode) {
  data.validate();
  if (data.task != cfg.task) throw InvalidInput("train: dataset is for task " + to_string(data.task) + ", config says " + to_string(cfg.task));
  Trainer trainer = resume ? Trainer(cfg, *resume) : Trainer(cfg);
  TrainRun run;
  std::ofstream csv;
  if (out_dir) {
    fs::create_directories(*out_dir / "checkpoints");
    csv.open(*out_dir / "metrics.csv", std::ios::trunc);
    if (!csv) throw InvalidInput("train: cannot write metrics in " + out_dir->string());
    csv << kMetricsSchema << "\n" << kMetricsHeader << "\n";
  }
  auto save = [&](const std::string& stem) {
    const fs::path p = *out_dir / "checkpoints" / (stem + ".ckpt");
    save_checkpoint(p, trainer.checkpoint());
    run.checkpoints.push_back(p);
  };
  while (trainer.episode() < cfg.max_episode) {
    EpisodeMetrics m;
    try {
      m = trainer.train_episode(data);
    } catch (const NumericFault&) {
      if (out_dir) save("fault");
      throw;
    }
    run.metrics.push_back(m);
    if (csv.is_open()) csv << metrics_row(m) << "\n" << std::flush;
    if (on_episode) on_episode(m);
    if (out_dir && (trainer.episode() % cfg.checkpoint_every == 0 || trainer.episode() == cfg.max_episode)) {
      char stem[64];
      std::snprintf(stem, sizeof stem, "%s_ep%06d", to_string(cfg.phase).c_str(), trainer.episode());
      save(stem);
    }
  }
  run.final_checkpoint = trainer.checkpoint();
  return run;
}

SaliencyEdit saliency_edit(const ImagePlane& image, const ImagePlane& mask, const TrainConfig& cfg) {
  TrainConfig c = cfg;
  c.task = Task::Saliency;
  c.minibatch = 1;
  Trainer trainer(c);
  const EnvState start = EnvState::start(Task::Saliency, image, std::nullopt, mask, c.t_max);
  SaliencyEdit out;
  while (trainer.episode() < c.max_episode) out.metrics.push_back(trainer.train_episode(std::vector<EnvState>{start}));
  out.edited = policy_rollout(trainer.network(), Task::Saliency, image, start.mask, c.t_max, task_params_for(c),
                              SampleMode::Greedy)
                   .images.back();
  return out;
}

}  // namespace pixelrl
