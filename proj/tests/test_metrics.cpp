#include <doctest.h>

#include <cmath>
#include <random>

#include "svgr/error.h"
#include "svgr/metrics.h"

using namespace svgr;

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

FeatureSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t d, double shift = 0.0, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n * d);
  for (auto& x : v) x = shift + scale * g(rng);
  return FeatureSet(n, d, std::move(v));
}

void mean_var(const std::vector<double>& x, double& mean, double& var) {
  mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size() - 1);
}

RasterImage solid(int w, int h, std::uint8_t v) {
  return RasterImage(w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 4, v));
}

// Direct 2-D windowed SSIM over luma on white, for comparison with the
// separable implementation.
double ssim_reference(const RasterImage& a, const RasterImage& b) {
  const int w = a.width(), h = a.height();
  auto luma = [](const RasterImage& img, int x, int y) {
    const auto* p = img.pixel(x, y);
    const double al = p[3] / 255.0;
    const double r = al * p[0] / 255.0 + 1.0 - al;
    const double g = al * p[1] / 255.0 + 1.0 - al;
    const double bl = al * p[2] / 255.0 + 1.0 - al;
    return 0.299 * r + 0.587 * g + 0.114 * bl;
  };
  double total = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double ws = 0, mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int dy = -5; dy <= 5; ++dy) {
        for (int dx = -5; dx <= 5; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          const double wt = std::exp(-(dx * dx + dy * dy) / (2 * 1.5 * 1.5));
          const double va = luma(a, xx, yy), vb = luma(b, xx, yy);
          ws += wt;
          mx += wt * va;
          my += wt * vb;
          sxx += wt * va * va;
          syy += wt * vb * vb;
          sxy += wt * va * vb;
        }
      }
      mx /= ws;
      my /= ws;
      const double vx = sxx / ws - mx * mx, vy = syy / ws - my * my, cxy = sxy / ws - mx * my;
      const double c1 = 1e-4, c2 = 9e-4;
      total += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  }
  return total / (w * h);
}

}  // namespace

TEST_CASE("rates and mean complexity") {
  std::vector<RenderVerdict> v(10);
  for (int i = 0; i < 7; ++i) v[i].renderable = true;
  CHECK(validity_rate(v) == 70.0);
  for (auto& x : v) x.renderable = true;
  CHECK(validity_rate(v) == 100.0);
  for (auto& x : v) x.renderable = false;
  CHECK(validity_rate(v) == 0.0);
  CHECK(code_of([] { validity_rate(std::span<const RenderVerdict>{}); }) == ErrorCode::kEmptyInput);

  const bool flags[] = {true, true, false, false};
  CHECK(dwt_cover_rate(flags) == 50.0);
  const bool all[] = {true, true, true};
  CHECK(dwt_cover_rate(all) == 100.0);
  CHECK(code_of([] { dwt_cover_rate(std::span<const bool>{}); }) == ErrorCode::kEmptyInput);

  std::vector<ComplexityReport> reports(2);
  reports[0].total = 3;
  reports[1].total = 1;
  CHECK(mean_complexity(reports) == 2.0);
  reports.resize(1);
  reports[0].total = 5;
  CHECK(mean_complexity(reports) == 5.0);
  CHECK(mean_complexity(std::vector<ComplexityReport>(4)) == 0.0);
  CHECK(code_of([] { mean_complexity(std::span<const ComplexityReport>{}); }) == ErrorCode::kEmptyInput);

  // permutation invariance
  const bool shuffled[] = {false, true, false, true};
  CHECK(dwt_cover_rate(shuffled) == dwt_cover_rate(flags));
}

TEST_CASE("fid: 1-D closed-form examples") {
  auto a = FeatureSet::from_rows({{0}, {0}, {0}});
  auto b = FeatureSet::from_rows({{2}, {2}});
  CHECK(fid(a, b) == doctest::Approx(4.0).epsilon(1e-12));

  // equal means, variances 1 and 4 (unbiased)
  auto c = FeatureSet::from_rows({{-1}, {1}, {0}, {0}});  // var = 2/3 ... rescale below
  double m, v;
  mean_var({-1, 1, 0, 0}, m, v);
  const double k = 1.0 / std::sqrt(v);
  auto c1 = FeatureSet::from_rows({{-k}, {k}, {0}, {0}});
  auto c4 = FeatureSet::from_rows({{-2 * k}, {2 * k}, {0}, {0}});
  CHECK(fid(c1, c4) == doctest::Approx(1.0).epsilon(1e-12));
  (void)c;
}

TEST_CASE("fid: properties and closed-form oracles") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 20; ++t) {
    auto x = random_set(rng, 50, 8);
    CHECK(fid(x, x) < 1e-6);
    auto y = random_set(rng, 40, 8, 0.5, 1.3);
    CHECK(std::abs(fid(x, y) - fid(y, x)) < 1e-8);
    CHECK(fid(x, y) >= 0.0);

    std::vector<double> xs = x.values(), ys = y.values();
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += 3.0 * static_cast<double>(i % 8);
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] += 3.0 * static_cast<double>(i % 8);
    CHECK(std::abs(fid(FeatureSet(50, 8, xs), FeatureSet(40, 8, ys)) - fid(x, y)) < 1e-8);
  }

  for (int t = 0; t < 200; ++t) {
    auto a = random_set(rng, 2 + rng() % 20, 1, 3.0 * (static_cast<double>(rng() % 100) / 100.0));
    auto b = random_set(rng, 2 + rng() % 20, 1, -1.0, 2.0);
    double ma, va, mb, vb;
    mean_var(a.values(), ma, va);
    mean_var(b.values(), mb, vb);
    const double expected = (ma - mb) * (ma - mb) + std::pow(std::sqrt(va) - std::sqrt(vb), 2);
    CHECK(std::abs(fid(a, b) - expected) < 1e-10);
  }

  // 2-D: Tr((Sa Sb)^1/2) = sqrt(tr(Sa Sb) + 2 sqrt(det Sa det Sb))
  for (int t = 0; t < 100; ++t) {
    auto a = random_set(rng, 30, 2);
    auto b = random_set(rng, 25, 2, 1.0, 0.5);
    auto stats = [](const FeatureSet& f, double mu[2], double s[2][2]) {
      const double n = static_cast<double>(f.rows());
      mu[0] = mu[1] = 0;
      for (std::size_t r = 0; r < f.rows(); ++r)
        for (int c = 0; c < 2; ++c) mu[c] += f.at(r, c) / n;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          s[i][j] = 0;
          for (std::size_t r = 0; r < f.rows(); ++r) s[i][j] += (f.at(r, i) - mu[i]) * (f.at(r, j) - mu[j]);
          s[i][j] /= n - 1;
        }
    };
    double ma[2], mb[2], sa[2][2], sb[2][2];
    stats(a, ma, sa);
    stats(b, mb, sb);
    double tr_ab = 0;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) tr_ab += sa[i][k] * sb[k][i];
    const double det_a = sa[0][0] * sa[1][1] - sa[0][1] * sa[1][0];
    const double det_b = sb[0][0] * sb[1][1] - sb[0][1] * sb[1][0];
    const double tr_sqrt = std::sqrt(tr_ab + 2 * std::sqrt(det_a * det_b));
    const double expected = (ma[0] - mb[0]) * (ma[0] - mb[0]) + (ma[1] - mb[1]) * (ma[1] - mb[1]) + sa[0][0] +
                            sa[1][1] + sb[0][0] + sb[1][1] - 2 * tr_sqrt;
    CHECK(std::abs(fid(a, b) - expected) < 1e-9);
  }
}

TEST_CASE("fid and FeatureSet errors") {
  auto a = FeatureSet::from_rows({{0, 1}, {1, 0}});
  auto b = FeatureSet::from_rows({{0}, {1}});
  CHECK(code_of([&] { fid(a, b); }) == ErrorCode::kDimensionMismatch);
  CHECK_THROWS_AS(FeatureSet::from_rows({{1.0}}), Error);
  CHECK_THROWS_AS(FeatureSet::from_rows({{1.0}, {NAN}}), Error);
  CHECK(code_of([] { FeatureSet::from_rows({{1.0}, {1.0, 2.0}}); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("raster similarity: examples") {
  auto black = solid(4, 4, 0);
  auto white = solid(4, 4, 255);
  CHECK(mse(black, white) == 1.0);
  CHECK(psnr_from_mse(mse(black, white)) == 0.0);

  auto s = raster_similarity(white, white);
  CHECK(s.mse == 0.0);
  CHECK(std::isinf(s.psnr));
  CHECK(s.ssim == 1.0);
  CHECK_FALSE(s.embed_cos);

  // 2x1 images differing by 0.5 in one channel of one pixel; 255 * 0.5 is
  // not a byte, so use the exact 8-bit difference
  RasterImage a(2, 1), b(2, 1);
  b.mutable_pixels()[0] = 128;
  const double d = 128.0 / 255.0;
  CHECK(mse(a, b) == doctest::Approx(d * d / 8.0).epsilon(1e-15));
  CHECK(mse(a, b) == mse(b, a));

  CHECK(code_of([&] { mse(a, black); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([&] { ssim(a, black); }) == ErrorCode::kDimensionMismatch);

  MockScorer scorer;
  auto with_embed = raster_similarity(black, white, &scorer);
  REQUIRE(with_embed.embed_cos);
  CHECK(*with_embed.embed_cos >= -1.0);
  CHECK(*with_embed.embed_cos <= 1.0);
  CHECK(*raster_similarity(black, black, &scorer).embed_cos == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim: matches a direct windowed reference") {
  std::mt19937 rng(1);
  for (int t = 0; t < 8; ++t) {
    const int w = 5 + static_cast<int>(rng() % 20), h = 5 + static_cast<int>(rng() % 20);
    RasterImage a(w, h), b(w, h);
    for (auto& p : a.mutable_pixels()) p = static_cast<std::uint8_t>(rng());
    b.mutable_pixels() = a.pixels();
    for (auto& p : b.mutable_pixels()) p = static_cast<std::uint8_t>(std::clamp<int>(p + static_cast<int>(rng() % 61) - 30, 0, 255));
    const double got = ssim(a, b);
    CHECK(got == doctest::Approx(ssim_reference(a, b)).epsilon(1e-9));
    CHECK(got <= 1.0);
    CHECK(got >= -1.0);
    CHECK(ssim(a, a) == 1.0);
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("approx_token_count") {
  CHECK(approx_token_count("") == 0);
  CHECK(approx_token_count("  a  bb\n\tccc ") == 3);
  CHECK(approx_token_count("one") == 1);
}

TEST_CASE("aggregate_report") {
  CandidateRecord good;
  good.renderable = true;
  good.structurally_valid = true;
  good.complexity = ComplexityReport{3, 1, 4, 0};
  good.semantic = 0.5;
  good.aesthetic = 0.25;
  good.total_reward = 0.6;
  CandidateRecord bad;
  std::vector<CandidateRecord> recs = {good, bad};
  auto r = aggregate_report(recs);
  CHECK(r.n_candidates == 2);
  CHECK(r.validity_rate_pct == 50.0);
  CHECK(r.dwt_cover_pct == 50.0);
  CHECK(r.mean_complexity == 4.0);
  CHECK(r.mean_semantic == 0.5);
  CHECK(r.mean_aesthetic == 0.25);
  CHECK(r.mean_reward == 0.3);
  CHECK_FALSE(r.fid);
  CHECK_FALSE(r.raster_similarity);

  std::vector<CandidateRecord> all_good(3, good);
  CHECK(aggregate_report(all_good).validity_rate_pct == 100.0);
  CHECK(code_of([] { aggregate_report(std::span<const CandidateRecord>{}); }) == ErrorCode::kEmptyInput);

  auto fa = FeatureSet::from_rows({{0}, {0}});
  auto fb = FeatureSet::from_rows({{2}, {2}});
  auto with_fid = aggregate_report(recs, &fa, &fb);
  REQUIRE(with_fid.fid);
  CHECK(*with_fid.fid == doctest::Approx(4.0));

  recs[0].similarity = RasterSimilarity{0.0, INFINITY, 1.0, 0.5};
  recs[1].similarity = RasterSimilarity{0.5, 3.0, 0.0, std::nullopt};
  auto sim = aggregate_report(recs).raster_similarity;
  REQUIRE(sim);
  CHECK(sim->count == 2);
  CHECK(sim->mse == 0.25);
  CHECK(std::isinf(sim->psnr));
  CHECK(sim->ssim == 0.5);
  CHECK(sim->embed_cos == 0.5);
}
