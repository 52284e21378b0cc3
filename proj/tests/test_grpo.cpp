#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "svgr/error.h"
#include "svgr/grpo.h"

using namespace svgr;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

std::vector<double> big_advantages(const std::vector<double>& r, double delta) {
  Big mean = 0;
  for (double x : r) mean += Big(x);
  mean /= r.size();
  Big var = 0;
  for (double x : r) var += (Big(x) - mean) * (Big(x) - mean);
  var /= r.size();
  const Big denom = sqrt(var) + Big(delta);
  std::vector<double> out;
  for (double x : r) out.push_back(static_cast<double>((Big(x) - mean) / denom));
  return out;
}

TokenLogProbs lp(std::vector<double> v) { return TokenLogProbs(std::move(v)); }

}  // namespace

TEST_CASE("group_advantages: examples") {
  CHECK(group_advantages(std::vector<double>{1, 1, 1, 1}, 1e-4) == std::vector<double>{0, 0, 0, 0});
  CHECK(group_advantages(std::vector<double>{1, 0}, 0.0) == std::vector<double>{1.0, -1.0});
  auto a = group_advantages(std::vector<double>{2, 1, 0}, 0.0);
  CHECK(a[0] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
  CHECK(a[1] == 0.0);
  CHECK(a[2] == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-15));
  CHECK(code_of([] { group_advantages(std::vector<double>{3, 3}, 0.0); }) == ErrorCode::kDegenerateGroup);
  CHECK(code_of([] { group_advantages(std::vector<double>{3}, 1e-4); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("group_advantages: arbitrary-precision oracle and moments") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int g = 2 + static_cast<int>(rng() % 7);
    std::vector<double> r(g);
    for (auto& x : r) x = u(rng);
    const auto a = group_advantages(r, 1e-4);
    const auto ref = big_advantages(r, 1e-4);
    for (int i = 0; i < g; ++i) CHECK(std::abs(a[i] - ref[i]) < 1e-10);

    const auto z = group_advantages(r, 0.0);
    double mean = 0.0, var = 0.0;
    for (double x : z) mean += x;
    mean /= g;
    for (double x : z) var += (x - mean) * (x - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var / g) - 1.0) < 1e-9);

    std::vector<double> scaled = r;
    for (auto& x : scaled) x *= 7.5;
    const auto zs = group_advantages(scaled, 0.0);
    for (int i = 0; i < g; ++i) CHECK(std::abs(zs[i] - z[i]) < 1e-9);
  }
}

TEST_CASE("probability_ratio") {
  CHECK(probability_ratio(lp({-1, -2}), lp({-1, -2})) == std::vector<double>{1, 1});
  auto r = probability_ratio(lp({-1 + std::numbers::ln2, -3}), lp({-1, -3}));
  CHECK(r[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(code_of([] { probability_ratio(lp({-1, -1, -1}), lp({-1, -1, -1, -1})); }) == ErrorCode::kLengthMismatch);
  CHECK_THROWS_AS(lp({0.5}), Error);
  CHECK_THROWS_AS(lp({-INFINITY}), Error);
}

TEST_CASE("clipped_surrogate: hand table and lower envelope") {
  CHECK(clipped_surrogate(1.0, 0.5, 0.2) == 0.5);
  CHECK(clipped_surrogate(1.5, 1.0, 0.2) == 1.2);
  CHECK(clipped_surrogate(0.5, -1.0, 0.2) == -0.8);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ratio(0.0, 3.0), adv(-3.0, 3.0), eps(0.01, 0.99);
  for (int i = 0; i < 2000; ++i) {
    const double r = ratio(rng), a = adv(rng), e = eps(rng);
    CHECK(clipped_surrogate(r, a, e) <= r * a);
  }
  CHECK_THROWS_AS(clipped_surrogate(std::vector<double>{1.0}, 1.0, 1.0), Error);
}

TEST_CASE("kl_estimate") {
  CHECK(kl_estimate(lp({-1, -2}), lp({-1, -2})) == std::vector<double>{0, 0});
  auto k = kl_estimate(lp({std::log(0.5)}), lp({std::log(0.25)}));
  CHECK(std::abs(k[0] - 0.193147) < 1e-6);
  // exact value: 0.5 + ln 2 - 1
  CHECK(k[0] == doctest::Approx(std::numbers::ln2 - 0.5).epsilon(1e-14));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-20.0, 0.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng);
    const auto v = kl_estimate(lp({a}), lp({b}))[0];
    CHECK(v >= 0.0);
    CHECK(v > 0.0);
  }
  CHECK(code_of([] { kl_estimate(lp({-1}), lp({-1, -1})); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("grpo_objective: hand example and degenerate rewards") {
  GrpoConfig cfg;
  cfg.group_size = 2;
  cfg.advantage_delta = 0.0;
  std::vector<GroupSample> g = {{1.0, lp({-0.5, -1}), lp({-0.5, -1}), lp({-0.5, -1})},
                                {0.0, lp({-0.2}), lp({-0.2}), lp({-0.2})}};
  auto res = grpo_objective(g, cfg);
  CHECK(res.advantages == std::vector<double>{1, -1});
  CHECK(res.per_token_surrogate[0] == std::vector<double>{1, 1});
  CHECK(res.objective == 0.0);

  cfg.advantage_delta = 1e-4;
  cfg.kl_beta = 0.3;
  std::vector<GroupSample> flat = {{0.5, lp({-0.5, -1}), lp({-0.6, -1}), lp({-1.5, -0.2})},
                                   {0.5, lp({-0.2}), lp({-0.1}), lp({-0.9})}};
  res = grpo_objective(flat, cfg);
  CHECK(res.mean_surrogate == 0.0);
  CHECK(res.objective == doctest::Approx(-0.3 * res.mean_kl).epsilon(1e-15));
  CHECK(res.mean_kl > 0.0);

  CHECK(code_of([&] { grpo_objective(std::span<const GroupSample>{}, cfg); }) == ErrorCode::kEmptyInput);
  cfg.group_size = 3;
  CHECK(code_of([&] { grpo_objective(flat, cfg); }) == ErrorCode::kInvalidArgument);
  cfg.group_size = 2;
  flat[1].logp_old = lp({-0.1, -0.1});
  CHECK(code_of([&] { grpo_objective(flat, cfg); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("grpo_objective: beta 0 inside the clip band equals the importance-weighted mean") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0), base(-4.0, -0.3), shift(-0.15, 0.15);
  for (int trial = 0; trial < 200; ++trial) {
    GrpoConfig cfg;
    cfg.group_size = 4;
    cfg.kl_beta = 0.0;
    std::vector<GroupSample> g;
    for (int k = 0; k < 4; ++k) {
      const int n = 1 + static_cast<int>(rng() % 6);
      std::vector<double> old_lp(n), new_lp(n);
      for (int t = 0; t < n; ++t) {
        old_lp[t] = base(rng);
        new_lp[t] = old_lp[t] + shift(rng);  // exp(0.15) < 1.2 and exp(-0.15) > 0.8
      }
      g.push_back({u(rng), lp(new_lp), lp(old_lp), lp(old_lp)});
    }
    const auto res = grpo_objective(g, cfg);
    double brute = 0.0;
    for (int k = 0; k < 4; ++k) {
      double s = 0.0;
      const auto& nv = g[k].logp_new.values();
      const auto& ov = g[k].logp_old.values();
      for (std::size_t t = 0; t < nv.size(); ++t) s += std::exp(nv[t] - ov[t]) * res.advantages[k];
      brute += s / static_cast<double>(nv.size());
    }
    brute /= 4.0;
    CHECK(std::abs(res.objective - brute) < 1e-10);
  }
}

TEST_CASE("ema_update") {
  CHECK(ema_update(std::vector<double>{1, 2}, std::vector<double>{5, 6}, 1.0) == std::vector<double>{1, 2});
  CHECK(ema_update(std::vector<double>{1, 2}, std::vector<double>{5, 6}, 0.0) == std::vector<double>{5, 6});
  CHECK(ema_update(std::vector<double>{0}, std::vector<double>{1}, 0.99)[0] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(code_of([] { ema_update(std::vector<double>{0}, std::vector<double>{1, 2}, 0.5); }) ==
        ErrorCode::kLengthMismatch);
  CHECK_THROWS_AS(ema_update(std::vector<double>{0}, std::vector<double>{1}, 1.5), Error);
}

TEST_CASE("sft_nll") {
  CHECK(sft_nll(lp({0, 0, 0})) == 0.0);
  CHECK(sft_nll(lp({std::log(0.5), std::log(0.5)})) == doctest::Approx(1.386294).epsilon(1e-6));
  CHECK(code_of([] { sft_nll(lp({})); }) == ErrorCode::kEmptySequence);
  const std::vector<double> a = {-0.1, -2.5}, b = {-0.7};
  std::vector<double> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  CHECK(sft_nll(lp(ab)) == doctest::Approx(sft_nll(lp(a)) + sft_nll(lp(b))).epsilon(1e-15));
}

TEST_CASE("GrpoConfig validation") {
  GrpoConfig c;
  CHECK_NOTHROW(c.validate());
  c.group_size = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.clip_epsilon = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.kl_beta = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}
