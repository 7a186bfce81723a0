#include "pixelrl/learn.hpp"

#include <cmath>
#include <string>

namespace pixelrl {

namespace {

void check_maps(const std::vector<ScalarField>& maps, const ScalarField& ref, const char* what) {
  for (const auto& m : maps)
    if (!m.same_shape(ref)) throw InvalidInput(std::string(what) + ": map shape mismatch");
}

void check_returns_input(const std::vector<ScalarField>& rewards, const std::optional<ScalarField>& bootstrap) {
  if (rewards.empty()) throw InvalidInput("returns: empty trajectory");
  check_maps(rewards, rewards.front(), "returns");
  if (bootstrap && !bootstrap->same_shape(rewards.front())) throw InvalidInput("returns: bootstrap shape mismatch");
}

}  // namespace

void Trajectory::validate() const {
  if (rewards.empty()) throw InvalidInput("trajectory: no steps");
  if (values.size() != rewards.size() || log_probs.size() != rewards.size())
    throw InvalidInput("trajectory: rewards/values/log_probs lengths differ");
  check_maps(rewards, rewards.front(), "trajectory");
  check_maps(values, rewards.front(), "trajectory");
  check_maps(log_probs, rewards.front(), "trajectory");
  if (bootstrap && !bootstrap->same_shape(rewards.front())) throw InvalidInput("trajectory: bootstrap shape mismatch");
}

std::vector<ScalarField> compute_returns(const std::vector<ScalarField>& rewards,
                                         const std::optional<ScalarField>& bootstrap, const RewardKernel& w,
                                         double gamma, Backend backend) {
  check_returns_input(rewards, bootstrap);
  const ScalarField& r0 = rewards.front();
  ScalarField R = bootstrap ? *bootstrap : ScalarField(r0.height(), r0.width(), 0.0);
  std::vector<ScalarField> out(rewards.size());
  for (std::size_t k = rewards.size(); k-- > 0;) {
    for (double& v : R.data()) v *= gamma;
    R = conv2d_return(R, w, backend);
    for (std::size_t i = 0; i < R.size(); ++i) R[i] = rewards[k][i] + R[i];
    out[k] = R;
  }
  return out;
}

std::vector<ScalarField> scalar_returns(const std::vector<ScalarField>& rewards,
                                        const std::optional<ScalarField>& bootstrap, double gamma) {
  check_returns_input(rewards, bootstrap);
  const ScalarField& r0 = rewards.front();
  ScalarField R = bootstrap ? *bootstrap : ScalarField(r0.height(), r0.width(), 0.0);
  std::vector<ScalarField> out(rewards.size());
  for (std::size_t k = rewards.size(); k-- > 0;) {
    for (std::size_t i = 0; i < R.size(); ++i) R[i] = rewards[k][i] + gamma * R[i];
    out[k] = R;
  }
  return out;
}

std::vector<ScalarField> advantages(const std::vector<ScalarField>& returns, const std::vector<ScalarField>& values) {
  if (returns.size() != values.size()) throw InvalidInput("advantages: step counts differ");
  std::vector<ScalarField> out;
  out.reserve(returns.size());
  for (std::size_t k = 0; k < returns.size(); ++k) {
    require_same_shape(returns[k], values[k], "advantages");
    ScalarField a(returns[k].height(), returns[k].width());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = returns[k][i] - values[k][i];
    out.push_back(std::move(a));
  }
  return out;
}

Losses compute_losses(const Trajectory& traj, const std::vector<ScalarField>& returns) {
  traj.validate();
  if (returns.size() != traj.rewards.size()) throw InvalidInput("losses: returns length mismatch");
  check_maps(returns, traj.rewards.front(), "losses");
  double p = 0.0, v = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < returns.size(); ++k)
    for (std::size_t i = 0; i < returns[k].size(); ++i) {
      const double adv = returns[k][i] - traj.values[k][i];
      p += -traj.log_probs[k][i] * adv;
      v += adv * adv;
      ++count;
    }
  Losses l{p / static_cast<double>(count), v / static_cast<double>(count)};
  if (!std::isfinite(l.policy) || !std::isfinite(l.value)) throw NumericFault("losses: non-finite loss");
  return l;
}

std::vector<ScalarField> return_gradients(const Trajectory& traj, const std::vector<ScalarField>& returns,
                                          double value_weight, double scale) {
  traj.validate();
  if (returns.size() != traj.rewards.size()) throw InvalidInput("return_gradients: returns length mismatch");
  std::vector<ScalarField> g;
  g.reserve(returns.size());
  for (std::size_t k = 0; k < returns.size(); ++k) {
    ScalarField m(returns[k].height(), returns[k].width());
    for (std::size_t i = 0; i < m.size(); ++i)
      m[i] = scale * (-traj.log_probs[k][i] + value_weight * 2.0 * (returns[k][i] - traj.values[k][i]));
    g.push_back(std::move(m));
  }
  return g;
}

std::vector<double> kernel_gradient(const std::vector<ScalarField>& returns,
                                    const std::optional<ScalarField>& bootstrap,
                                    const std::vector<ScalarField>& grads, const RewardKernel& w, double gamma,
                                    Backend backend) {
  if (!w.trainable()) throw StateError("kernel_gradient: reward kernel is frozen (phase rmc-off)");
  if (grads.size() != returns.size()) throw InvalidInput("kernel_gradient: gradient length mismatch");
  check_returns_input(returns, bootstrap);
  check_maps(grads, returns.front(), "kernel_gradient");
  const std::size_t T = returns.size();
  std::vector<double> dw(static_cast<std::size_t>(w.side()) * w.side(), 0.0);
  const ScalarField zero(returns.front().height(), returns.front().width(), 0.0);
  // R_k = r_k + conv(gamma * R_{k+1}, w); the total gradient on R_k flows
  // forward in k because R_k feeds nothing but the earlier steps' returns.
  ScalarField gbar = grads[0];
  for (std::size_t k = 0; k < T; ++k) {
    ScalarField next = k + 1 < T ? returns[k + 1] : (bootstrap ? *bootstrap : zero);
    for (double& v : next.data()) v *= gamma;
    accumulate_kernel_gradient(gbar, next, dw, w.side(), backend);
    if (k + 1 < T) {
      ScalarField back = conv2d_return_adjoint(gbar, w, backend);
      ScalarField g = grads[k + 1];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gamma * back[i];
      gbar = std::move(g);
    }
  }
  return dw;
}

double accumulated_reward(const std::vector<ScalarField>& rewards, double gamma) {
  if (rewards.empty()) return 0.0;
  double total = 0.0, discount = 1.0;
  for (const auto& r : rewards) {
    double s = 0.0;
    for (double v : r.data()) s += v;
    total += discount * s;
    discount *= gamma;
  }
  return total / static_cast<double>(rewards.front().size());
}

double poly_lr(int episode, int max_episode, double base_lr, double power) {
  if (max_episode < 1) throw InvalidInput("poly_lr: max_episode must be >= 1");
  if (episode < 0 || episode > max_episode)
    throw InvalidInput("poly_lr: episode " + std::to_string(episode) + " outside [0, " + std::to_string(max_episode) + "]");
  return base_lr * std::pow(1.0 - static_cast<double>(episode) / max_episode, power);
}

void adam_update(std::vector<double>& params, const std::vector<double>& grad, AdamState& state, double lr,
                 const AdamConfig& cfg) {
  if (grad.size() != params.size()) throw InvalidInput("adam: gradient size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw StateError("adam: optimizer state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / c1, vhat = state.v[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

double global_norm(const std::vector<const std::vector<double>*>& grads) {
  double s = 0.0;
  for (const auto* g : grads)
    for (double v : *g) s += v * v;
  return std::sqrt(s);
}

double clip_global_norm(const std::vector<std::vector<double>*>& grads, double max_norm) {
  std::vector<const std::vector<double>*> view(grads.begin(), grads.end());
  const double norm = global_norm(view);
  if (max_norm > 0.0 && norm > max_norm) {
    const double f = max_norm / norm;
    for (auto* g : grads)
      for (double& v : *g) v *= f;
  }
  return norm;
}

}  // namespace pixelrl
