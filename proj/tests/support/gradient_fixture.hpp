// Finite-difference harness for the actor-critic loss: a tiny network on
// fixed 8x8 observations, actions and rewards, plus an independent
// scalar-arithmetic loss used as the oracle.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "pixelrl/learn.hpp"
#include "pixelrl/network.hpp"
#include "pixelrl/trainer.hpp"
#include "test_util.hpp"

namespace gradcheck {

using namespace pixelrl;


constexpr int kH = 8, kW = 8, kT = 2, kSide = 11;

struct Fixture {
  Network net;
  RewardKernel kernel{kSide, true};
  std::vector<ImagePlane> obs;
  std::vector<ActionMap> actions;
  std::vector<ScalarField> rewards;
  GradientOptions opt;

  explicit Fixture(std::uint64_t seed, double gamma = 0.9, int steps = kT) {
    const Architecture arch = Architecture::tiny(1, 9, 4);
    validate_receptive_field(arch, kSide);
    net = Network::init(arch, seed);
    // Non-zero policy output and jittered biases so every path carries signal.
    std::mt19937_64 rng(seed + 1);
    std::normal_distribution<double> n(0.0, 0.3);
    for (double& p : net.params()) p += 0.1 * n(rng);
    for (auto& w : kernel.weights()) w += 0.05 * n(rng);
    for (int t = 0; t < steps; ++t) {
      obs.push_back(testutil::random_image(kH, kW, 1, seed * 10 + t));
      ActionMap a(kH, kW);
      for (auto& id : a.ids) id = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 8)(rng));
      actions.push_back(a);
      rewards.push_back(testutil::random_field(kH, kW, seed * 100 + t));
    }
    opt.gamma = gamma;
    opt.value_weight = 1.0;
    opt.scale = 1.0 / (kH * kW * steps);
  }

  // Forward pass over the fixed observations with the given parameters.
  RolloutRecord record(const Network& n) const {
    RolloutRecord rec;
    rec.caches.resize(obs.size());
    Tensor hidden;
    for (std::size_t t = 0; t < obs.size(); ++t) {
      PolicyValue pv = forward(n, obs[t], hidden, Backend::Serial, &rec.caches[t]);
      ScalarField lp(kH, kW);
      for (std::size_t p = 0; p < lp.size(); ++p) lp[p] = pv.log_policy.data[actions[t].ids[p] * lp.size() + p];
      rec.trajectory.rewards.push_back(rewards[t]);
      rec.trajectory.values.push_back(pv.value);
      rec.trajectory.log_probs.push_back(lp);
      rec.policies.push_back(pv.policy);
      rec.log_policies.push_back(pv.log_policy);
      rec.actions.push_back(actions[t]);
      hidden = pv.hidden;
    }
    return rec;
  }

  // Scalar-arithmetic loss. `frozen_adv` (if given) replaces R - V in the policy term.
  double loss(const Network& n, const RewardKernel& w, const std::vector<ScalarField>* frozen_adv,
              const std::vector<ScalarField>* frozen_values, const std::vector<ScalarField>* frozen_logp) const {
    const RolloutRecord rec = record(n);
    const auto R = compute_returns(rewards, std::nullopt, w, opt.gamma, Backend::Serial);
    double total = 0.0;
    for (std::size_t t = 0; t < obs.size(); ++t)
      for (std::size_t p = 0; p < R[t].size(); ++p) {
        const double v = frozen_values ? (*frozen_values)[t][p] : rec.trajectory.values[t][p];
        const double lp = frozen_logp ? (*frozen_logp)[t][p] : rec.trajectory.log_probs[t][p];
        const double adv = frozen_adv ? (*frozen_adv)[t][p] : R[t][p] - v;
        total += -lp * adv + opt.value_weight * (R[t][p] - v) * (R[t][p] - v);
        if (opt.entropy_beta > 0.0) {
          double h = 0.0;
          for (int a = 0; a < 9; ++a) {
            const double pa = rec.policies[t].data[a * R[t].size() + p];
            h -= pa * rec.log_policies[t].data[a * R[t].size() + p];
          }
          total -= opt.entropy_beta * h;
        }
      }
    return opt.scale * total;
  }
};

struct Agreement {
  double norm_rel = 0.0;
  double worst = 0.0;
};

inline Agreement compare(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff2 = 0.0, ref2 = 0.0;
  Agreement a;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff2 += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    ref2 += numeric[i] * numeric[i];
    const double floor = 1e-7;
    const double rel = std::fabs(analytic[i] - numeric[i]) / std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), floor});
    a.worst = std::max(a.worst, rel);
  }
  a.norm_rel = std::sqrt(diff2 / std::max(ref2, 1e-300));
  return a;
}

inline std::vector<double> network_fd(const Fixture& f, const std::vector<ScalarField>& frozen_adv) {
  const double h = 1e-6;
  Network n = f.net;
  std::vector<double> g(n.param_count());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double orig = n.params()[i];
    n.params()[i] = orig + h;
    const double lp = f.loss(n, f.kernel, &frozen_adv, nullptr, nullptr);
    n.params()[i] = orig - h;
    const double lm = f.loss(n, f.kernel, &frozen_adv, nullptr, nullptr);
    n.params()[i] = orig;
    g[i] = (lp - lm) / (2 * h);
  }
  return g;
}

inline std::vector<double> kernel_fd(const Fixture& f) {
  const double h = 1e-6;
  const RolloutRecord base = f.record(f.net);
  RewardKernel w = f.kernel;
  std::vector<double> g(w.weights().size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double orig = w.weights()[i];
    w.weights()[i] = orig + h;
    const double lp = f.loss(f.net, w, nullptr, &base.trajectory.values, &base.trajectory.log_probs);
    w.weights()[i] = orig - h;
    const double lm = f.loss(f.net, w, nullptr, &base.trajectory.values, &base.trajectory.log_probs);
    w.weights()[i] = orig;
    g[i] = (lp - lm) / (2 * h);
  }
  return g;
}

inline std::vector<ScalarField> base_advantages(const Fixture& f) {
  const RolloutRecord rec = f.record(f.net);
  const auto R = compute_returns(f.rewards, std::nullopt, f.kernel, f.opt.gamma, Backend::Serial);
  return advantages(R, rec.trajectory.values);
}

}  // namespace gradcheck
