#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svgr/complexity.h"
#include "svgr/raster.h"
#include "svgr/reward.h"
#include "svgr/scorer.h"

namespace svgr {

// Percent of renderable verdicts. Throws kEmptyInput.
double validity_rate(std::span<const RenderVerdict> verdicts);
double validity_rate(std::span<const bool> renderable);

// Percent of true flags. Throws kEmptyInput.
double dwt_cover_rate(std::span<const bool> flags);

// Mean of report totals. Throws kEmptyInput.
double mean_complexity(std::span<const ComplexityReport> reports);

// N x D row-major feature matrix.
class FeatureSet {
 public:
  // Throws kInvalidArgument unless N >= 2, D >= 1, values.size() == N * D and
  // all values are finite.
  FeatureSet(std::size_t rows, std::size_t dim, std::vector<double> values, std::string source_label = {});
  static FeatureSet from_rows(const std::vector<std::vector<double>>& rows, std::string source_label = {});

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& values() const { return values_; }
  double at(std::size_t row, std::size_t col) const { return values_[row * dim_ + col]; }
  const std::string& source_label() const { return label_; }

 private:
  std::size_t rows_;
  std::size_t dim_;
  std::vector<double> values_;
  std::string label_;
};

// Frechet distance between Gaussian fits (unbiased covariance). Throws
// kDimensionMismatch or kNumericalFailure.
double fid(const FeatureSet& a, const FeatureSet& b);

// Mean squared error over all RGBA samples scaled to [0,1].
double mse(const RasterImage& a, const RasterImage& b);
// 10 log10(1 / mse); +infinity when mse == 0.
double psnr_from_mse(double mse_value);
// Mean SSIM of the luma planes (images composited on white, Rec. 601
// weights), Gaussian 11x11 window with sigma 1.5, clipped at the borders.
double ssim(const RasterImage& a, const RasterImage& b);

struct RasterSimilarity {
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> embed_cos;
};

// Throws kDimensionMismatch for differently sized images. embed_cos is the
// raw cosine of the scorer's image embeddings when a scorer is given.
RasterSimilarity raster_similarity(const RasterImage& a, const RasterImage& b, ScorerClient* scorer = nullptr);

// Whitespace-separated token count; an approximation of model tokens.
std::size_t approx_token_count(std::string_view text);

struct CandidateRecord {
  bool renderable = false;
  bool structurally_valid = false;
  std::optional<ComplexityReport> complexity;  // when the SVG parsed
  double semantic = 0.0;
  double aesthetic = 0.0;
  double total_reward = 0.0;
  std::size_t dwt_tokens_approx = 0;
  std::optional<RasterSimilarity> similarity;  // when a reference was compared
};

CandidateRecord make_record(const CandidateEvaluation& evaluation);

struct SimilarityMeans {
  std::size_t count = 0;
  double mse = 0.0;
  double psnr = 0.0;  // +infinity if any pair was identical
  double ssim = 0.0;
  std::optional<double> embed_cos;
};

struct EvalReport {
  std::size_t n_candidates = 0;
  double validity_rate_pct = 0.0;
  double dwt_cover_pct = 0.0;
  // Over candidates whose SVG parsed (0 when none did).
  double mean_complexity = 0.0;
  // Over renderable candidates (0 when none rendered).
  double mean_semantic = 0.0;
  double mean_aesthetic = 0.0;
  double mean_reward = 0.0;
  double mean_dwt_tokens_approx = 0.0;
  std::optional<double> fid;
  std::optional<SimilarityMeans> raster_similarity;
};

// Throws kEmptyInput. fid is computed when both feature sets are given.
EvalReport aggregate_report(std::span<const CandidateRecord> records, const FeatureSet* features_a = nullptr,
                            const FeatureSet* features_b = nullptr);

}  // namespace svgr
