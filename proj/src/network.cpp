#include "pixelrl/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pixelrl {

namespace {

int spec_radius(const std::vector<LayerSpec>& layers) {
  int r = 0;
  for (const auto& l : layers) r += l.dilation * (l.k / 2);
  return r;
}

void check_spec(const LayerSpec& l, const char* where) {
  if (l.out < 1 || l.k < 1 || l.k % 2 == 0 || l.dilation < 1)
    throw ConfigError(std::string("architecture: bad layer in ") + where + " (need out>=1, odd k, dilation>=1)");
}

nlohmann::json layers_to_json(const std::vector<LayerSpec>& layers) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& l : layers) a.push_back({{"out", l.out}, {"k", l.k}, {"dilation", l.dilation}});
  return a;
}

std::vector<LayerSpec> layers_from_json(const nlohmann::json& a) {
  std::vector<LayerSpec> out;
  for (const auto& e : a) out.push_back({e.at("out").get<int>(), e.at("k").get<int>(), e.at("dilation").get<int>()});
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void relu_inplace(Tensor& t) {
  for (double& v : t.data) v = v < 0.0 ? 0.0 : v;  // NaN passes through
}

void relu_backward_inplace(Tensor& grad, const Tensor& out) {
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!(out.data[i] > 0.0)) grad.data[i] = 0.0;
}

std::span<double> weight_slice(std::vector<double>& g, const Layer& l) {
  return {g.data() + l.weight_offset, l.shape.weight_count()};
}
std::span<double> bias_slice(std::vector<double>& g, const Layer& l) {
  return {g.data() + l.bias_offset, static_cast<std::size_t>(l.shape.out)};
}

Tensor channel_range(const Tensor& t, int begin, int count) {
  Tensor out(count, t.h, t.w);
  std::copy(t.channel(begin), t.channel(begin) + count * t.plane(), out.data.begin());
  return out;
}

void require_finite(const Tensor& t, const char* what) {
  const auto bad = std::count_if(t.data.begin(), t.data.end(), [](double v) { return !std::isfinite(v); });
  if (bad > 0)
    throw NumericFault(std::string("network: ") + std::to_string(bad) + " non-finite values in " + what + " (" +
                       std::to_string(t.c) + "x" + std::to_string(t.h) + "x" + std::to_string(t.w) + ")");
}

}  // namespace

// ---- architecture ---------------------------------------------------------

Architecture Architecture::standard(int in_channels, int actions, int width) {
  Architecture a;
  a.in_channels = in_channels;
  a.actions = actions;
  a.trunk = {{width, 3, 1}, {width, 3, 2}, {width, 3, 3}, {width, 3, 4}};
  a.policy_head = {{width, 3, 3}, {width, 3, 2}};
  a.value_head = {{width, 3, 3}, {width, 3, 2}};
  a.gru_channels = width;
  return a;
}

Architecture Architecture::tiny(int in_channels, int actions, int width) {
  Architecture a;
  a.in_channels = in_channels;
  a.actions = actions;
  a.trunk = {{width, 3, 1}, {width, 3, 2}};
  a.policy_head = {{width, 3, 1}};
  a.value_head = {{width, 3, 1}};
  a.gru_channels = width;
  return a;
}

int Architecture::policy_radius() const {
  return spec_radius(trunk) + spec_radius(policy_head) + gru_kernel / 2 + policy_out_kernel / 2;
}

int Architecture::value_radius() const { return spec_radius(trunk) + spec_radius(value_head) + value_out_kernel / 2; }

int Architecture::receptive_radius() const {
  if (policy_radius() != value_radius())
    throw ConfigError("architecture: policy receptive radius " + std::to_string(policy_radius()) +
                      " differs from value radius " + std::to_string(value_radius()));
  return policy_radius();
}

void Architecture::validate() const {
  if (in_channels < 1) throw ConfigError("architecture: in_channels must be >= 1");
  if (actions < 2 || actions > 255) throw ConfigError("architecture: actions must be in [2,255]");
  if (gru_channels < 1) throw ConfigError("architecture: gru_channels must be >= 1");
  for (const auto& l : trunk) check_spec(l, "trunk");
  for (const auto& l : policy_head) check_spec(l, "policy head");
  for (const auto& l : value_head) check_spec(l, "value head");
  for (int k : {gru_kernel, policy_out_kernel, value_out_kernel}) check_spec({1, k, 1}, "output/gru kernels");
  receptive_radius();
}

std::string Architecture::to_json() const {
  nlohmann::json j = {{"in_channels", in_channels},
                      {"actions", actions},
                      {"trunk", layers_to_json(trunk)},
                      {"policy_head", layers_to_json(policy_head)},
                      {"value_head", layers_to_json(value_head)},
                      {"gru_channels", gru_channels},
                      {"gru_kernel", gru_kernel},
                      {"policy_out_kernel", policy_out_kernel},
                      {"value_out_kernel", value_out_kernel}};
  return j.dump();
}

Architecture Architecture::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Architecture a;
    a.in_channels = j.at("in_channels").get<int>();
    a.actions = j.at("actions").get<int>();
    a.trunk = layers_from_json(j.at("trunk"));
    a.policy_head = layers_from_json(j.at("policy_head"));
    a.value_head = layers_from_json(j.at("value_head"));
    a.gru_channels = j.at("gru_channels").get<int>();
    a.gru_kernel = j.at("gru_kernel").get<int>();
    a.policy_out_kernel = j.at("policy_out_kernel").get<int>();
    a.value_out_kernel = j.at("value_out_kernel").get<int>();
    a.validate();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("architecture json: ") + e.what());
  }
}

void validate_receptive_field(const Architecture& arch, int kernel_side) {
  arch.validate();
  const int side = 2 * arch.receptive_radius() + 1;
  if (side != kernel_side)
    throw ConfigError("receptive field " + std::to_string(side) + "x" + std::to_string(side) +
                      " does not match reward kernel side " + std::to_string(kernel_side));
}

// ---- parameters -----------------------------------------------------------

Network::Network(const Architecture& arch) : arch_(arch) {
  arch_.validate();
  std::size_t offset = 0;
  auto add = [&](std::string name, int in, const LayerSpec& s) {
    Layer l{std::move(name), ConvShape{in, s.out, s.k, s.dilation}, offset, 0};
    offset += l.shape.weight_count();
    l.bias_offset = offset;
    offset += static_cast<std::size_t>(s.out);
    layers_.push_back(std::move(l));
    return s.out;
  };
  int c = arch.in_channels;
  for (std::size_t i = 0; i < arch.trunk.size(); ++i) c = add("trunk" + std::to_string(i), c, arch.trunk[i]);
  const int trunk_out = c;
  for (std::size_t i = 0; i < arch.policy_head.size(); ++i)
    c = add("policy" + std::to_string(i), c, arch.policy_head[i]);
  const int g = arch.gru_channels;
  add("gru_gates", c + g, {2 * g, arch.gru_kernel, 1});
  add("gru_candidate", c + g, {g, arch.gru_kernel, 1});
  add("policy_out", g, {arch.actions, arch.policy_out_kernel, 1});
  c = trunk_out;
  for (std::size_t i = 0; i < arch.value_head.size(); ++i) c = add("value" + std::to_string(i), c, arch.value_head[i]);
  add("value_out", c, {1, arch.value_out_kernel, 1});
  params_.assign(offset, 0.0);
}

Network Network::init(const Architecture& arch, std::uint64_t seed) {
  Network net(arch);
  std::mt19937_64 rng(seed);
  for (std::size_t li = 0; li < net.layers_.size(); ++li) {
    const Layer& l = net.layers_[li];
    const double fan_in = static_cast<double>(l.shape.in) * l.shape.k * l.shape.k;
    const double fan_out = static_cast<double>(l.shape.out) * l.shape.k * l.shape.k;
    double stddev;
    if (li == net.policy_out())
      stddev = 0.0;
    else if (li == net.gru_gates() || li == net.gru_candidate())
      stddev = std::sqrt(2.0 / (fan_in + fan_out));
    else if (li == net.value_out())
      stddev = std::sqrt(1.0 / fan_in);
    else
      stddev = std::sqrt(2.0 / fan_in);
    double* w = net.params_.data() + l.weight_offset;
    if (stddev > 0.0) {
      std::normal_distribution<double> n(0.0, stddev);
      for (std::size_t i = 0; i < l.shape.weight_count(); ++i) w[i] = n(rng);
    }
  }
  const Layer& gates = net.layers_[net.gru_gates()];
  for (int i = 0; i < arch.gru_channels; ++i) net.params_[gates.bias_offset + i] = 2.0;
  return net;
}

// ---- forward / backward ---------------------------------------------------

Tensor zero_hidden(const Network& net, int height, int width) {
  return Tensor(net.arch().gru_channels, height, width);
}

PolicyValue forward(const Network& net, const ImagePlane& observation, const Tensor& hidden, Backend backend,
                    StepCache* cache) {
  const Architecture& arch = net.arch();
  if (observation.channels() != arch.in_channels)
    throw InvalidInput("forward: observation has " + std::to_string(observation.channels()) +
                       " channels, network expects " + std::to_string(arch.in_channels));
  const int H = observation.height(), W = observation.width();
  const auto& layers = net.layers();
  auto conv = [&](std::size_t li, const Tensor& in, Tensor& out) {
    conv_forward(in, net.weights(layers[li]), net.bias(layers[li]), layers[li].shape, out, backend);
  };

  StepCache local;
  StepCache& c = cache ? *cache : local;
  c.input = Tensor(observation.channels(), H, W);
  std::copy(observation.data().begin(), observation.data().end(), c.input.data.begin());

  c.trunk.resize(arch.trunk.size());
  const Tensor* cur = &c.input;
  for (std::size_t i = 0; i < arch.trunk.size(); ++i) {
    conv(net.trunk_begin() + i, *cur, c.trunk[i]);
    relu_inplace(c.trunk[i]);
    cur = &c.trunk[i];
  }
  const Tensor* trunk_out = cur;

  c.policy_head.resize(arch.policy_head.size());
  for (std::size_t i = 0; i < arch.policy_head.size(); ++i) {
    conv(net.policy_head_begin() + i, *cur, c.policy_head[i]);
    relu_inplace(c.policy_head[i]);
    cur = &c.policy_head[i];
  }
  const Tensor& xg = *cur;

  const int G = arch.gru_channels;
  if (hidden.data.empty()) {
    c.h_prev = Tensor(G, H, W);
  } else {
    if (hidden.c != G || hidden.h != H || hidden.w != W) throw InvalidInput("forward: hidden state shape mismatch");
    c.h_prev = hidden;
  }
  c.xh = concat_channels(xg, c.h_prev);
  Tensor gates;
  conv(net.gru_gates(), c.xh, gates);
  c.z = channel_range(gates, 0, G);
  c.r = channel_range(gates, G, G);
  for (double& v : c.z.data) v = sigmoid(v);
  for (double& v : c.r.data) v = sigmoid(v);
  Tensor rh = c.h_prev;
  for (std::size_t i = 0; i < rh.size(); ++i) rh.data[i] *= c.r.data[i];
  c.xrh = concat_channels(xg, rh);
  conv(net.gru_candidate(), c.xrh, c.candidate);
  for (double& v : c.candidate.data) v = std::tanh(v);
  c.hidden = Tensor(G, H, W);
  for (std::size_t i = 0; i < c.hidden.size(); ++i)
    c.hidden.data[i] = (1.0 - c.z.data[i]) * c.h_prev.data[i] + c.z.data[i] * c.candidate.data[i];

  PolicyValue pv;
  Tensor logits;
  conv(net.policy_out(), c.hidden, logits);
  const int A = arch.actions;
  const std::size_t n = logits.plane();
  pv.policy = Tensor(A, H, W);
  pv.log_policy = Tensor(A, H, W);
  for (std::size_t p = 0; p < n; ++p) {
    double m = logits.data[p];
    for (int a = 1; a < A; ++a) m = std::max(m, logits.data[a * n + p]);
    double s = 0.0;
    for (int a = 0; a < A; ++a) s += std::exp(logits.data[a * n + p] - m);
    const double log_s = std::log(s);
    for (int a = 0; a < A; ++a) {
      const double lp = logits.data[a * n + p] - m - log_s;
      pv.log_policy.data[a * n + p] = lp;
      pv.policy.data[a * n + p] = std::exp(lp);
    }
  }

  cur = trunk_out;
  c.value_head.resize(arch.value_head.size());
  for (std::size_t i = 0; i < arch.value_head.size(); ++i) {
    conv(net.value_head_begin() + i, *cur, c.value_head[i]);
    relu_inplace(c.value_head[i]);
    cur = &c.value_head[i];
  }
  Tensor v;
  conv(net.value_out(), *cur, v);
  pv.value = ScalarField(H, W);
  std::copy(v.data.begin(), v.data.end(), pv.value.data().begin());

  require_finite(logits, "policy logits");
  require_finite(v, "value");
  require_finite(c.hidden, "recurrent state");
  pv.hidden = c.hidden;
  return pv;
}

Tensor backward(const Network& net, const StepCache& c, const Tensor& dlogits, const Tensor& dvalue,
                const Tensor& dh_next, std::vector<double>& grad, Backend backend) {
  const Architecture& arch = net.arch();
  const auto& layers = net.layers();
  if (grad.size() != net.param_count()) throw InvalidInput("backward: gradient buffer size mismatch");
  const int H = c.input.h, W = c.input.w, G = arch.gru_channels;
  auto conv_back = [&](std::size_t li, const Tensor& in, const Tensor& dy, Tensor* dx) {
    const Layer& l = layers[li];
    conv_backward(in, net.weights(l), dy, l.shape, dx, weight_slice(grad, l), bias_slice(grad, l), backend);
  };
  const Tensor& trunk_out = arch.trunk.empty() ? c.input : c.trunk.back();
  Tensor dtrunk(trunk_out.c, H, W);

  // Policy branch.
  Tensor dh = dh_next.data.empty() ? Tensor(G, H, W) : dh_next;
  if (!dlogits.data.empty()) {
    Tensor dh_out;
    conv_back(net.policy_out(), c.hidden, dlogits, &dh_out);
    for (std::size_t i = 0; i < dh.size(); ++i) dh.data[i] += dh_out.data[i];
  }
  Tensor dh_prev(G, H, W), dcand_pre(G, H, W), dgates(2 * G, H, W);
  const std::size_t gn = dh.size();
  for (std::size_t i = 0; i < gn; ++i) {
    const double z = c.z.data[i], cand = c.candidate.data[i];
    const double dz = dh.data[i] * (cand - c.h_prev.data[i]);
    dcand_pre.data[i] = dh.data[i] * z * (1.0 - cand * cand);
    dh_prev.data[i] = dh.data[i] * (1.0 - z);
    dgates.data[i] = dz * z * (1.0 - z);
  }
  Tensor dxrh;
  conv_back(net.gru_candidate(), c.xrh, dcand_pre, &dxrh);
  const int Cx = c.xrh.c - G;
  const std::size_t xn = static_cast<std::size_t>(Cx) * c.xrh.plane();
  for (std::size_t i = 0; i < gn; ++i) {
    const double drh = dxrh.data[xn + i];
    const double r = c.r.data[i];
    dh_prev.data[i] += drh * r;
    dgates.data[gn + i] = drh * c.h_prev.data[i] * r * (1.0 - r);
  }
  Tensor dxh;
  conv_back(net.gru_gates(), c.xh, dgates, &dxh);
  Tensor dxg(Cx, H, W);
  for (std::size_t i = 0; i < xn; ++i) dxg.data[i] = dxrh.data[i] + dxh.data[i];
  for (std::size_t i = 0; i < gn; ++i) dh_prev.data[i] += dxh.data[xn + i];

  for (std::size_t k = arch.policy_head.size(); k-- > 0;) {
    relu_backward_inplace(dxg, c.policy_head[k]);
    const Tensor& in = k == 0 ? trunk_out : c.policy_head[k - 1];
    Tensor din;
    conv_back(net.policy_head_begin() + k, in, dxg, &din);
    dxg = std::move(din);
  }
  for (std::size_t i = 0; i < dtrunk.size(); ++i) dtrunk.data[i] += dxg.data[i];

  // Value branch.
  if (!dvalue.data.empty()) {
    const Tensor& vin = arch.value_head.empty() ? trunk_out : c.value_head.back();
    Tensor dv;
    conv_back(net.value_out(), vin, dvalue, &dv);
    for (std::size_t k = arch.value_head.size(); k-- > 0;) {
      relu_backward_inplace(dv, c.value_head[k]);
      const Tensor& in = k == 0 ? trunk_out : c.value_head[k - 1];
      Tensor din;
      conv_back(net.value_head_begin() + k, in, dv, &din);
      dv = std::move(din);
    }
    for (std::size_t i = 0; i < dtrunk.size(); ++i) dtrunk.data[i] += dv.data[i];
  }

  // Trunk; the observation needs no gradient.
  for (std::size_t k = arch.trunk.size(); k-- > 0;) {
    relu_backward_inplace(dtrunk, c.trunk[k]);
    const Tensor& in = k == 0 ? c.input : c.trunk[k - 1];
    if (k == 0) {
      conv_back(net.trunk_begin(), in, dtrunk, nullptr);
    } else {
      Tensor din;
      conv_back(net.trunk_begin() + k, in, dtrunk, &din);
      dtrunk = std::move(din);
    }
  }
  return dh_prev;
}

ActionMap sample_actions(const Tensor& policy, SampleMode mode, std::mt19937_64& rng) {
  const std::size_t n = policy.plane();
  const int A = policy.c;
  if (A < 1 || A > 256) throw InvalidInput("sample_actions: bad action count");
  for (std::size_t p = 0; p < n; ++p) {
    double s = 0.0;
    for (int a = 0; a < A; ++a) {
      const double v = policy.data[a * n + p];
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("sample_actions: policy entry outside [0,1]");
      s += v;
    }
    if (std::fabs(s - 1.0) > 1e-6) throw InvalidInput("sample_actions: policy not normalized at pixel " + std::to_string(p));
  }
  ActionMap amap(policy.h, policy.w);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t p = 0; p < n; ++p) {
    int chosen = 0;
    if (mode == SampleMode::Greedy) {
      double best = policy.data[p];
      for (int a = 1; a < A; ++a)
        if (policy.data[a * n + p] > best) {
          best = policy.data[a * n + p];
          chosen = a;
        }
    } else {
      const double x = u(rng);
      double cum = 0.0;
      chosen = -1;
      int last_nonzero = 0;
      for (int a = 0; a < A; ++a) {
        const double v = policy.data[a * n + p];
        if (v > 0.0) last_nonzero = a;
        cum += v;
        if (chosen < 0 && x < cum) chosen = a;
      }
      if (chosen < 0) chosen = last_nonzero;  // rounding left x above the cumulative sum
    }
    amap.ids[p] = static_cast<std::uint8_t>(chosen);
  }
  return amap;
}

}  // namespace pixelrl
