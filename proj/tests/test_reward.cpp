#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "svgr/error.h"
#include "svgr/png.h"
#include "svgr/reward.h"
#include "test_util.h"

using namespace svgr;

namespace {

const RewardWeights kDefaultWeights{0.1, 0.1, 0.6, 0.2};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

class DownScorer final : public ScorerClient {
 public:
  ScorerMode mode() const override { return ScorerMode::kRemote; }
  EmbeddingVector embed_text(std::string_view) override { throw Error(ErrorCode::kScorerUnavailable, "down"); }
  EmbeddingVector embed_image(const RasterImage&) override { throw Error(ErrorCode::kScorerUnavailable, "down"); }
  double aesthetic(const RasterImage&, std::string_view) override { throw Error(ErrorCode::kScorerUnavailable, "down"); }
  double consistency(const RasterImage&, std::string_view, std::string_view) override {
    throw Error(ErrorCode::kScorerUnavailable, "down");
  }
};

}  // namespace

TEST_CASE("semantic_reward: examples") {
  EmbeddingVector e1({1, 0, 0}), e2({0, 1, 0}), neg({-1, 0, 0});
  CHECK(semantic_reward(e1, e1) == 1.0);
  CHECK(semantic_reward(e1, e2) == 0.0);
  CHECK(semantic_reward(e1, neg) == 0.0);
  CHECK(semantic_reward(EmbeddingVector({3, 4}), EmbeddingVector({4, 3})) == doctest::Approx(24.0 / 25.0).epsilon(1e-15));
  CHECK(code_of([] { semantic_reward(EmbeddingVector({1, 0}), EmbeddingVector({1, 0, 0})); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { semantic_reward(EmbeddingVector({0, 0}), EmbeddingVector({1, 0})); }) == ErrorCode::kZeroVector);
  CHECK_THROWS_AS(EmbeddingVector({}), Error);
  CHECK_THROWS_AS(EmbeddingVector({1.0, NAN}), Error);
}

TEST_CASE("hybrid_reward: examples") {
  CHECK(hybrid_reward({1, 1, 1, 1}, kDefaultWeights).total == 1.0);
  CHECK(hybrid_reward({0, 0, 0, 0}, kDefaultWeights).total == 0.0);
  CHECK(hybrid_reward({0, 0, 0, 0}, {3, 1, 2, 5}).total == 0.0);
  CHECK(hybrid_reward({1, 1, 0.5, 0.5}, kDefaultWeights).total == doctest::Approx(0.6).epsilon(1e-15));
  auto b = hybrid_reward({0.25, 1, 0.5, 0.75}, kDefaultWeights);
  CHECK(b.r_think == 0.25);
  CHECK(b.r_render == 1);
  CHECK(b.r_semantic == 0.5);
  CHECK(b.r_aesthetic == 0.75);
  CHECK(b.weights_used.semantic == 0.6);
}

TEST_CASE("hybrid_reward: range and weight validation") {
  CHECK(code_of([] { hybrid_reward({1.1, 1, 1, 1}, kDefaultWeights); }) == ErrorCode::kComponentOutOfRange);
  CHECK(code_of([] { hybrid_reward({1, 0.5, 1, 1}, kDefaultWeights); }) == ErrorCode::kComponentOutOfRange);
  CHECK(code_of([] { hybrid_reward({1, 1, -0.1, 1}, kDefaultWeights); }) == ErrorCode::kComponentOutOfRange);
  CHECK(code_of([] { hybrid_reward({1, 1, 1, NAN}, kDefaultWeights); }) == ErrorCode::kComponentOutOfRange);
  CHECK(code_of([] { hybrid_reward({1, 1, 1, 1}, {0, 0, 0, 0}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { hybrid_reward({1, 1, 1, 1}, {-1, 1, 1, 1}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("hybrid_reward: linearity, monotonicity, bound, argmax invariance") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_components = [&] { return RewardComponents{u(rng), u(rng) < 0.5 ? 0.0 : 1.0, u(rng), u(rng)}; };
  for (int trial = 0; trial < 500; ++trial) {
    RewardWeights w{u(rng), u(rng), u(rng), u(rng) + 1e-3};
    const double alpha = 10.0 * u(rng);
    auto c = random_components();
    const double base = hybrid_reward(c, w).total;
    CHECK(hybrid_reward(c, w.scaled(alpha)).total == doctest::Approx(alpha * base).epsilon(1e-12));

    auto bumped = c;
    bumped.semantic = std::min(1.0, c.semantic + u(rng));
    CHECK(hybrid_reward(bumped, w).total >= base);

    const double sum = w.think + w.render + w.semantic + w.aesthetic;
    const double t = hybrid_reward(c, w.scaled(1.0 / sum)).total;
    CHECK(t >= 0.0);
    CHECK(t <= 1.0 + 1e-12);

    std::vector<RewardComponents> set(8);
    for (auto& s : set) s = random_components();
    auto ranking = [&](const RewardWeights& ww) {
      std::vector<double> totals;
      for (const auto& s : set) totals.push_back(hybrid_reward(s, ww).total);
      return std::max_element(totals.begin(), totals.end()) - totals.begin();
    };
    CHECK(ranking(w) == ranking(w.scaled(alpha + 0.01)));
  }
}

TEST_CASE("evaluate_candidate: complete trace and valid svg under the mock scorer") {
  const std::string response = testutil::read_file(testutil::data_dir() / "dwt" / "t01_complete.txt");
  const std::string prompt = "a red circle";
  MockScorer scorer;
  const auto b = evaluate_candidate(prompt, response, kDefaultWeights, scorer);
  CHECK(b.r_think == 1.0);
  CHECK(b.r_render == 1.0);

  // hand composition with the mock protocol
  const auto parts = split_response(response);
  const auto raster = check_renderable(*parts.svg_text).raster;
  REQUIRE(raster);
  const auto png = encode_png(*raster);
  const auto img = mock_embedding(fnv1a64(png), 64);
  const auto txt = mock_embedding(fnv1a64(prompt), 64);
  const double cos = std::inner_product(img.begin(), img.end(), txt.begin(), 0.0);
  CHECK(b.r_semantic == doctest::Approx(std::max(0.0, cos)).epsilon(1e-12));
  CHECK(b.r_aesthetic == static_cast<double>(fnv1a64(png) % 1000) / 999.0);
  CHECK(b.total == doctest::Approx(0.1 + 0.1 + 0.6 * b.r_semantic + 0.2 * b.r_aesthetic).epsilon(1e-12));

  const auto again = evaluate_candidate(prompt, response, kDefaultWeights, scorer);
  CHECK(again.total == b.total);
  CHECK(again.r_semantic == b.r_semantic);
}

TEST_CASE("evaluate_candidate: unrenderable svg zeroes semantic and aesthetic") {
  const std::string think = testutil::read_file(testutil::data_dir() / "dwt" / "t01_complete.txt");
  const std::string response = think.substr(0, think.find("<svg")) + "<svg><rect width=\"3\"></svg>";
  MockScorer scorer;
  auto ev = score_candidate("p", response, kDefaultWeights, scorer);
  CHECK(ev.breakdown.r_think == 1.0);
  CHECK(ev.breakdown.r_render == 0.0);
  CHECK(ev.breakdown.r_semantic == 0.0);
  CHECK(ev.breakdown.r_aesthetic == 0.0);
  CHECK(scorer.calls() == 0);

  auto empty_canvas = score_candidate("p", R"~(<svg viewBox="0 0 1 1"></svg>)~", kDefaultWeights, scorer);
  CHECK(empty_canvas.breakdown.total == 0.0);
  CHECK(empty_canvas.verdict.failure_stage == FailureStage::kEmptyCanvas);
}

TEST_CASE("evaluate_candidate: nothing to reward") {
  MockScorer scorer;
  CHECK(evaluate_candidate("p", "just some words", kDefaultWeights, scorer).total == 0.0);
  auto ev = score_candidate("p", "just some words", kDefaultWeights, scorer);
  CHECK(ev.verdict.failure_stage == FailureStage::kParseError);
  CHECK_FALSE(ev.complexity);
}

TEST_CASE("evaluate_candidate: scorer failures propagate") {
  DownScorer down;
  const std::string response = testutil::read_file(testutil::data_dir() / "dwt" / "t01_complete.txt");
  CHECK(code_of([&] { evaluate_candidate("p", response, kDefaultWeights, down); }) == ErrorCode::kScorerUnavailable);
  // unrenderable candidates never reach the scorer
  CHECK_NOTHROW(evaluate_candidate("p", "<think>x</think>", kDefaultWeights, down));
}
