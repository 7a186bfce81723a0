#include <cmath>

#include "doctest.h"
#include "pixelrl/learn.hpp"
#include "test_util.hpp"

using namespace pixelrl;

namespace {

std::vector<ScalarField> random_rewards(int steps, int h, int w, std::uint64_t seed) {
  std::vector<ScalarField> r;
  for (int t = 0; t < steps; ++t) r.push_back(testutil::random_field(h, w, seed + t, -100.0, 100.0));
  return r;
}

}  // namespace

TEST_CASE("returns with a uniform 3x3 kernel, gamma 0.5, two unit-reward steps") {
  const std::vector<ScalarField> r(2, ScalarField(5, 5, 1.0));
  const auto R = compute_returns(r, std::nullopt, RewardKernel::uniform(3), 0.5, Backend::Serial);
  REQUIRE(R.size() == 2);
  CHECK(R[1].at(2, 2) == doctest::Approx(1.0));
  CHECK(R[0].at(2, 2) == doctest::Approx(1.5));
  CHECK(R[0].at(0, 0) == doctest::Approx(1.0 + 0.5 * 4.0 / 9.0));
}

TEST_CASE("identity kernel reproduces the scalar recursion bitwise") {
  for (double gamma : {0.0, 0.5, 0.95, 1.0})
    for (int steps : {1, 5, 15}) {
      const auto r = random_rewards(steps, 7, 9, 100 * steps);
      const auto a = compute_returns(r, std::nullopt, RewardKernel::identity(33), gamma);
      const auto b = scalar_returns(r, std::nullopt, gamma);
      for (int t = 0; t < steps; ++t) REQUIRE(a[t].data() == b[t].data());
    }
}

TEST_CASE("scalar returns follow the textbook n-step sum") {
  const auto r = random_rewards(4, 3, 3, 7);
  const ScalarField boot = testutil::random_field(3, 3, 99);
  const double g = 0.9;
  const auto R = scalar_returns(r, boot, g);
  for (std::size_t i = 0; i < 9; ++i) {
    double expect = std::pow(g, 4) * boot[i];
    for (int t = 0; t < 4; ++t) expect += std::pow(g, t) * r[t][i];
    CHECK(R[0][i] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(R[3][i] == doctest::Approx(r[3][i] + g * boot[i]).epsilon(1e-12));
  }
  const auto Rk = compute_returns(r, boot, RewardKernel::identity(3), g);
  for (int t = 0; t < 4; ++t) CHECK(Rk[t].data() == R[t].data());
}

TEST_CASE("losses, advantages and accumulated reward") {
  Trajectory tr;
  tr.rewards = {ScalarField(1, 2, 1.0), ScalarField(1, 2, 2.0)};
  tr.values = {ScalarField(1, 2, 0.5), ScalarField(1, 2, 1.0)};
  tr.log_probs = {ScalarField(1, 2, -1.0), ScalarField(1, 2, -2.0)};
  const auto R = scalar_returns(tr.rewards, std::nullopt, 0.5);  // 2.0, 2.0
  const auto A = advantages(R, tr.values);
  CHECK(A[0][0] == doctest::Approx(1.5));
  CHECK(A[1][1] == doctest::Approx(1.0));
  const Losses l = compute_losses(tr, R);
  CHECK(l.policy == doctest::Approx((1.0 * 1.5 + 2.0 * 1.0) / 2.0));
  CHECK(l.value == doctest::Approx((1.5 * 1.5 + 1.0 * 1.0) / 2.0));
  CHECK(accumulated_reward(tr.rewards, 0.5) == doctest::Approx(1.0 + 0.5 * 2.0));
  tr.values.pop_back();
  CHECK_THROWS_AS(tr.validate(), InvalidInput);
}

TEST_CASE("polynomial learning-rate decay") {
  CHECK(poly_lr(0, 1000, 1e-3) == 1e-3);
  CHECK(poly_lr(500, 1000, 1e-3) == doctest::Approx(5.359e-4).epsilon(1e-4));
  CHECK(poly_lr(1000, 1000, 1e-3) == 0.0);
  CHECK_THROWS_AS(poly_lr(1001, 1000, 1e-3), InvalidInput);
  CHECK_THROWS_AS(poly_lr(-1, 1000, 1e-3), InvalidInput);
}

TEST_CASE("Adam update") {
  std::vector<double> p{1.0, -2.0, 0.0};
  const std::vector<double> g{0.3, -4.0, 0.0};
  AdamState st;
  adam_update(p, g, st, 0.01);
  // First bias-corrected step moves each coordinate by lr * g / (|g| + eps).
  CHECK(p[0] == doctest::Approx(1.0 - 0.01 * 0.3 / (0.3 + 1e-8)).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(-2.0 + 0.01 * 4.0 / (4.0 + 1e-8)).epsilon(1e-12));
  CHECK(p[2] == 0.0);
  CHECK(st.step == 1);
  adam_update(p, g, st, 0.01);
  CHECK(p[0] == doctest::Approx(1.0 - 0.02).epsilon(1e-6));
  std::vector<double> short_grad{1.0};
  CHECK_THROWS_AS(adam_update(p, short_grad, st, 0.01), InvalidInput);
}

TEST_CASE("global-norm clipping") {
  std::vector<double> a{3.0}, b{4.0};
  CHECK(global_norm({&a, &b}) == doctest::Approx(5.0));
  CHECK(clip_global_norm({&a, &b}, 10.0) == doctest::Approx(5.0));
  CHECK(a[0] == 3.0);
  clip_global_norm({&a, &b}, 1.0);
  CHECK(a[0] == doctest::Approx(0.6));
  CHECK(b[0] == doctest::Approx(0.8));
}
