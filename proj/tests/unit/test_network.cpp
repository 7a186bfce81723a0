#include <cmath>
#include <random>

#include "doctest.h"
#include "pixelrl/network.hpp"
#include "test_util.hpp"

using namespace pixelrl;

namespace {

// Does perturbing the input at (cy, cx + offset) change the outputs at (cy, cx)?
struct Reach {
  bool policy = false;
  bool value = false;
};

Reach reaches(const Network& net, int offset, const Tensor& hidden = {}) {
  const int S = 41, c = 20;
  const ImagePlane base = testutil::random_image(S, S, 1, 5);
  ImagePlane bumped = base;
  bumped.at(0, c, c + offset) += 0.5;
  const PolicyValue a = forward(net, base, hidden, Backend::Serial);
  const PolicyValue b = forward(net, bumped, hidden, Backend::Serial);
  Reach r;
  const std::size_t p = static_cast<std::size_t>(c) * S + c;
  for (int k = 0; k < net.arch().actions; ++k)
    r.policy |= a.policy.data[k * a.policy.plane() + p] != b.policy.data[k * b.policy.plane() + p];
  r.value = a.value.at(c, c) != b.value.at(c, c);
  return r;
}

Network jittered(const Architecture& arch, std::uint64_t seed) {
  Network net = Network::init(arch, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.1);
  for (double& p : net.params()) p += n(rng);
  return net;
}

}  // namespace

TEST_CASE("architecture radii") {
  const Architecture s = Architecture::standard(1, 9);
  CHECK(s.policy_radius() == 16);
  CHECK(s.value_radius() == 16);
  CHECK(2 * s.receptive_radius() + 1 == 33);
  CHECK(Architecture::tiny(1, 9).receptive_radius() == 5);
  CHECK_NOTHROW(validate_receptive_field(s, 33));
  CHECK_THROWS_AS(validate_receptive_field(s, 31), ConfigError);
  CHECK(Architecture::from_json(s.to_json()) == s);
}

TEST_CASE("measured receptive field is 33x33 at t=0") {
  const Network net = jittered(Architecture::standard(1, 9, 4), 3);
  for (int off : {0, 8, 16}) {
    const Reach r = reaches(net, off);
    CHECK(r.policy);
    CHECK(r.value);
  }
  const Reach far = reaches(net, 17);
  CHECK_FALSE(far.policy);
  CHECK_FALSE(far.value);
}

TEST_CASE("the recurrent state widens the policy field after the first step") {
  const Network net = jittered(Architecture::standard(1, 9, 4), 4);
  // The 3x3 recurrent gates add one pixel of reach per step, so a bump just
  // outside the t=0 field reaches the centre through the hidden state.
  const int S = 41, c = 20;
  ImagePlane a = testutil::random_image(S, S, 1, 6), b = a;
  b.at(0, c, c + 17) += 0.5;
  const PolicyValue ha = forward(net, a, {}, Backend::Serial), hb = forward(net, b, {}, Backend::Serial);
  const PolicyValue two_a = forward(net, a, ha.hidden, Backend::Serial);
  const PolicyValue two_b = forward(net, a, hb.hidden, Backend::Serial);
  CHECK(two_a.policy.at(0, c, c) != two_b.policy.at(0, c, c));
  CHECK(two_a.value.at(c, c) == two_b.value.at(c, c));
}

TEST_CASE("fresh network has a uniform policy and finite value") {
  const Network net = Network::init(Architecture::standard(3, 13, 8), 1);
  const PolicyValue pv = forward(net, testutil::random_image(12, 12, 3, 2), {});
  for (double p : pv.policy.data) CHECK(p == doctest::Approx(1.0 / 13.0).epsilon(1e-12));
  for (double v : pv.value.data()) CHECK(std::isfinite(v));
  CHECK(pv.hidden.c == 8);
  CHECK(Network::init(Architecture::standard(3, 13, 8), 1) == net);
  CHECK_FALSE(Network::init(Architecture::standard(3, 13, 8), 2) == net);
}

TEST_CASE("serial and OpenMP forward passes agree") {
  const Network net = jittered(Architecture::standard(1, 9, 6), 7);
  const ImagePlane img = testutil::random_image(20, 17, 1, 8);
  const PolicyValue a = forward(net, img, {}, Backend::Serial);
  const PolicyValue b = forward(net, img, {}, Backend::OpenMP);
  for (std::size_t i = 0; i < a.policy.size(); ++i) REQUIRE(a.policy.data[i] == doctest::Approx(b.policy.data[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < a.value.size(); ++i) REQUIRE(a.value[i] == doctest::Approx(b.value[i]).epsilon(1e-12));
}

TEST_CASE("non-finite outputs raise NumericFault") {
  Network net = Network::init(Architecture::tiny(1, 9), 1);
  net.params()[0] = std::nan("");
  CHECK_THROWS_AS(forward(net, testutil::random_image(8, 8, 1, 1), {}), NumericFault);
}

TEST_CASE("categorical sampling frequencies") {
  const int n = 20000;
  Tensor policy(3, 1, n);
  for (int i = 0; i < n; ++i) {
    policy.at(0, 0, i) = 0.1;
    policy.at(1, 0, i) = 0.2;
    policy.at(2, 0, i) = 0.7;
  }
  std::mt19937_64 rng(42);
  const ActionMap m = sample_actions(policy, SampleMode::Sample, rng);
  int counts[3] = {0, 0, 0};
  for (auto id : m.ids) ++counts[id];
  const double probs[3] = {0.1, 0.2, 0.7};
  for (int k = 0; k < 3; ++k) {
    const double sigma = std::sqrt(n * probs[k] * (1 - probs[k]));
    CHECK(std::fabs(counts[k] - n * probs[k]) < 3.0 * sigma);
  }
}

TEST_CASE("greedy selection breaks ties toward the lowest index") {
  Tensor policy(3, 1, 2);
  policy.at(0, 0, 0) = 0.2, policy.at(1, 0, 0) = 0.4, policy.at(2, 0, 0) = 0.4;
  policy.at(0, 0, 1) = 0.1, policy.at(1, 0, 1) = 0.1, policy.at(2, 0, 1) = 0.8;
  std::mt19937_64 rng(1);
  const ActionMap m = sample_actions(policy, SampleMode::Greedy, rng);
  CHECK(m.ids[0] == 1);
  CHECK(m.ids[1] == 2);
  policy.at(2, 0, 1) = 0.9;
  CHECK_THROWS_AS(sample_actions(policy, SampleMode::Greedy, rng), InvalidInput);
}
