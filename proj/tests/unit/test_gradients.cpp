// Analytic gradients of the actor-critic loss against central differences.
#include "doctest.h"
#include "gradient_fixture.hpp"

using namespace pixelrl;
using namespace gradcheck;

TEST_CASE("network gradient matches central differences (policy + value loss)") {
  Fixture f(7);
  const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
  const Agreement a = compare(g.network, network_fd(f, base_advantages(f)));
  MESSAGE("theta: norm-relative error " << a.norm_rel << ", worst coordinate " << a.worst);
  CHECK(a.norm_rel <= 1e-3);
}

TEST_CASE("network gradient agrees on the parallel backend too") {
  Fixture f(8);
  const RolloutRecord rec = f.record(f.net);
  const EpisodeGradients s = episode_gradients(f.net, f.kernel, rec, f.opt, Backend::Serial);
  const EpisodeGradients p = episode_gradients(f.net, f.kernel, rec, f.opt, Backend::OpenMP);
  for (std::size_t i = 0; i < s.network.size(); ++i) REQUIRE(p.network[i] == doctest::Approx(s.network[i]).epsilon(1e-9).scale(1e-12));
}

TEST_CASE("value-only and policy-only gradients match separately") {
  SUBCASE("value weight 0 isolates the policy term") {
    Fixture f(9);
    f.opt.value_weight = 0.0;
    const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
    CHECK(compare(g.network, network_fd(f, base_advantages(f))).norm_rel <= 1e-3);
  }
  SUBCASE("zero rewards and zero advantage leave only the value term") {
    Fixture f(10);
    const auto adv0 = std::vector<ScalarField>(kT, ScalarField(kH, kW, 0.0));
    const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
    // The frozen-advantage oracle with A = R - V reproduces the full loss; A = 0 removes the policy part.
    auto fd_full = network_fd(f, base_advantages(f));
    auto fd_value = network_fd(f, adv0);
    CHECK(compare(g.network, fd_full).norm_rel <= 1e-3);
    double diff = 0.0;
    for (std::size_t i = 0; i < fd_full.size(); ++i) diff += std::fabs(fd_full[i] - fd_value[i]);
    CHECK(diff > 0.0);
  }
}

TEST_CASE("entropy term gradient matches central differences") {
  Fixture f(11);
  f.opt.entropy_beta = 0.05;
  const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
  CHECK(compare(g.network, network_fd(f, base_advantages(f))).norm_rel <= 1e-3);
}

TEST_CASE("reward kernel gradient matches central differences") {
  Fixture f(12);
  const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
  REQUIRE(g.kernel.size() == static_cast<std::size_t>(kSide * kSide));
  const Agreement a = compare(g.kernel, kernel_fd(f));
  MESSAGE("w: norm-relative error " << a.norm_rel << ", worst coordinate " << a.worst);
  CHECK(a.norm_rel <= 1e-3);
}

TEST_CASE("reward kernel gradient starting from the identity kernel") {
  Fixture f(13);
  f.kernel = RewardKernel(kSide, true);
  const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
  CHECK(compare(g.kernel, kernel_fd(f)).norm_rel <= 1e-3);
}

TEST_CASE("three-step kernel gradient exercises the carried return gradient") {
  Fixture f(14, 0.8, 3);
  const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
  CHECK(compare(g.kernel, kernel_fd(f)).norm_rel <= 1e-3);
}

TEST_CASE("gamma 0 gives an exactly zero kernel gradient") {
  Fixture f(15, 0.0);
  const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
  for (double v : g.kernel) REQUIRE(v == 0.0);
}

TEST_CASE("single-step episode gives an exactly zero kernel gradient") {
  Fixture f(16, 0.9, 1);
  const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
  for (double v : g.kernel) REQUIRE(v == 0.0);
}

TEST_CASE("frozen kernel refuses a kernel gradient") {
  Fixture f(17);
  f.kernel.set_trainable(false);
  const EpisodeGradients g = episode_gradients(f.net, f.kernel, f.record(f.net), f.opt, Backend::Serial);
  CHECK(g.kernel.empty());
  const auto R = compute_returns(f.rewards, std::nullopt, f.kernel, 0.9);
  CHECK_THROWS_AS(kernel_gradient(R, std::nullopt, R, f.kernel, 0.9), StateError);
}
