#include "svgr/metrics.h"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "svgr/error.h"
#include "text_util.h"

namespace svgr {

namespace {

void require_non_empty(std::size_t n, const char* what) {
  if (n == 0) throw Error(ErrorCode::kEmptyInput, std::string(what) + " of an empty input");
}

void require_same_size(const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "images are " + std::to_string(a.width()) + "x" +
                                                   std::to_string(a.height()) + " and " + std::to_string(b.width()) +
                                                   "x" + std::to_string(b.height()));
  }
}

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> as_matrix(
    const FeatureSet& f) {
  return {f.values().data(), static_cast<Eigen::Index>(f.rows()), static_cast<Eigen::Index>(f.dim())};
}

void gaussian_stats(const FeatureSet& f, Vector& mean, Matrix& cov) {
  auto x = as_matrix(f);
  mean = x.colwise().mean().transpose();
  Matrix centered = x.rowwise() - mean.transpose();
  cov = (centered.transpose() * centered) / static_cast<double>(f.rows() - 1);
}

Eigen::SelfAdjointEigenSolver<Matrix> eigen_of(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kNumericalFailure, "eigendecomposition did not converge");
  return solver;
}

// Composited on white, Rec. 601 luma in [0,1].
std::vector<double> luma_plane(const RasterImage& img) {
  std::vector<double> out(static_cast<std::size_t>(img.width()) * img.height());
  const auto& px = img.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = px[i * 4 + 3] / 255.0;
    double c[3];
    for (int k = 0; k < 3; ++k) c[k] = a * (px[i * 4 + k] / 255.0) + (1.0 - a);
    out[i] = 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
  }
  return out;
}

constexpr int kWindowRadius = 5;
constexpr double kWindowSigma = 1.5;

// Separable Gaussian blur, window clipped to the image and renormalized.
std::vector<double> blur(const std::vector<double>& src, int w, int h) {
  std::array<double, 2 * kWindowRadius + 1> kernel{};
  for (int i = -kWindowRadius; i <= kWindowRadius; ++i) {
    kernel[i + kWindowRadius] = std::exp(-(i * i) / (2.0 * kWindowSigma * kWindowSigma));
  }
  std::vector<double> tmp(src.size()), out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0, ws = 0.0;
      for (int i = std::max(-kWindowRadius, -x); i <= std::min(kWindowRadius, w - 1 - x); ++i) {
        s += kernel[i + kWindowRadius] * src[static_cast<std::size_t>(y) * w + x + i];
        ws += kernel[i + kWindowRadius];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = s / ws;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0, ws = 0.0;
      for (int i = std::max(-kWindowRadius, -y); i <= std::min(kWindowRadius, h - 1 - y); ++i) {
        s += kernel[i + kWindowRadius] * tmp[static_cast<std::size_t>(y + i) * w + x];
        ws += kernel[i + kWindowRadius];
      }
      out[static_cast<std::size_t>(y) * w + x] = s / ws;
    }
  }
  return out;
}

std::vector<double> product(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "embedding dims differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values()[i] * b.values()[i];
    na += a.values()[i] * a.values()[i];
    nb += b.values()[i] * b.values()[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroVector, "zero embedding");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace

double validity_rate(std::span<const bool> renderable) {
  require_non_empty(renderable.size(), "validity_rate");
  std::size_t n = 0;
  for (bool r : renderable) n += r ? 1 : 0;
  return 100.0 * static_cast<double>(n) / static_cast<double>(renderable.size());
}

double validity_rate(std::span<const RenderVerdict> verdicts) {
  require_non_empty(verdicts.size(), "validity_rate");
  std::size_t n = 0;
  for (const auto& v : verdicts) n += v.renderable ? 1 : 0;
  return 100.0 * static_cast<double>(n) / static_cast<double>(verdicts.size());
}

double dwt_cover_rate(std::span<const bool> flags) {
  require_non_empty(flags.size(), "dwt_cover_rate");
  std::size_t n = 0;
  for (bool f : flags) n += f ? 1 : 0;
  return 100.0 * static_cast<double>(n) / static_cast<double>(flags.size());
}

double mean_complexity(std::span<const ComplexityReport> reports) {
  require_non_empty(reports.size(), "mean_complexity");
  std::size_t sum = 0;
  for (const auto& r : reports) sum += r.total;
  return static_cast<double>(sum) / static_cast<double>(reports.size());
}

FeatureSet::FeatureSet(std::size_t rows, std::size_t dim, std::vector<double> values, std::string source_label)
    : rows_(rows), dim_(dim), values_(std::move(values)), label_(std::move(source_label)) {
  if (rows_ < 2) throw Error(ErrorCode::kInvalidArgument, "a feature set needs at least 2 rows");
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "feature dimension must be positive");
  if (values_.size() != rows_ * dim_) {
    throw Error(ErrorCode::kInvalidArgument, "feature buffer has " + std::to_string(values_.size()) +
                                                 " values, expected " + std::to_string(rows_ * dim_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "feature values must be finite");
  }
}

FeatureSet FeatureSet::from_rows(const std::vector<std::vector<double>>& rows, std::string source_label) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "feature row " + std::to_string(i) + " has dimension " +
                                                     std::to_string(rows[i].size()) + ", expected " +
                                                     std::to_string(dim));
    }
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return FeatureSet(rows.size(), dim, std::move(flat), std::move(source_label));
}

double fid(const FeatureSet& a, const FeatureSet& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  Vector mu_a, mu_b;
  Matrix cov_a, cov_b;
  gaussian_stats(a, mu_a, cov_a);
  gaussian_stats(b, mu_b, cov_b);

  auto eig_a = eigen_of(cov_a);
  Vector sqrt_vals = eig_a.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix sqrt_a = eig_a.eigenvectors() * sqrt_vals.asDiagonal() * eig_a.eigenvectors().transpose();
  Matrix inner = sqrt_a * cov_b * sqrt_a;
  inner = 0.5 * (inner + inner.transpose());
  auto eig_inner = eigen_of(inner);
  const double tr_sqrt = eig_inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  const double d = (mu_a - mu_b).squaredNorm() + cov_a.trace() + cov_b.trace() - 2.0 * tr_sqrt;
  if (!std::isfinite(d)) throw Error(ErrorCode::kNumericalFailure, "non-finite Frechet distance");
  return std::max(0.0, d);
}

double mse(const RasterImage& a, const RasterImage& b) {
  require_same_size(a, b);
  const auto& pa = a.pixels();
  const auto& pb = b.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = (static_cast<double>(pa[i]) - static_cast<double>(pb[i])) / 255.0;
    sum += d * d;
  }
  return sum / static_cast<double>(pa.size());
}

double psnr_from_mse(double mse_value) {
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse_value);
}

double ssim(const RasterImage& a, const RasterImage& b) {
  require_same_size(a, b);
  const int w = a.width();
  const int h = a.height();
  const auto x = luma_plane(a);
  const auto y = luma_plane(b);
  const auto mu_x = blur(x, w, h);
  const auto mu_y = blur(y, w, h);
  const auto exx = blur(product(x, x), w, h);
  const auto eyy = blur(product(y, y), w, h);
  const auto exy = blur(product(x, y), w, h);
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double vx = exx[i] - mu_x[i] * mu_x[i];
    const double vy = eyy[i] - mu_y[i] * mu_y[i];
    const double cxy = exy[i] - mu_x[i] * mu_y[i];
    const double num = (2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * cxy + c2);
    const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (vx + vy + c2);
    sum += num / den;
  }
  return sum / static_cast<double>(x.size());
}

RasterSimilarity raster_similarity(const RasterImage& a, const RasterImage& b, ScorerClient* scorer) {
  RasterSimilarity out;
  out.mse = mse(a, b);
  out.psnr = psnr_from_mse(out.mse);
  out.ssim = ssim(a, b);
  if (scorer) out.embed_cos = cosine(scorer->embed_image(a), scorer->embed_image(b));
  return out;
}

std::size_t approx_token_count(std::string_view text) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = detail::is_space(c);
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

CandidateRecord make_record(const CandidateEvaluation& ev) {
  CandidateRecord r;
  r.renderable = ev.verdict.renderable;
  r.structurally_valid = ev.structurally_valid;
  r.complexity = ev.complexity;
  r.semantic = ev.breakdown.r_semantic;
  r.aesthetic = ev.breakdown.r_aesthetic;
  r.total_reward = ev.breakdown.total;
  r.dwt_tokens_approx = ev.parts.think_text ? approx_token_count(*ev.parts.think_text) : 0;
  return r;
}

EvalReport aggregate_report(std::span<const CandidateRecord> records, const FeatureSet* features_a,
                            const FeatureSet* features_b) {
  require_non_empty(records.size(), "aggregate_report");
  EvalReport report;
  report.n_candidates = records.size();

  std::size_t renderable = 0, valid_dwt = 0, parsed = 0, complexity_sum = 0;
  double semantic_sum = 0.0, aesthetic_sum = 0.0, reward_sum = 0.0, tokens_sum = 0.0;
  SimilarityMeans sim;
  std::size_t embed_count = 0;
  double embed_sum = 0.0;
  for (const auto& r : records) {
    if (r.renderable) {
      ++renderable;
      semantic_sum += r.semantic;
      aesthetic_sum += r.aesthetic;
    }
    if (r.structurally_valid) ++valid_dwt;
    if (r.complexity) {
      ++parsed;
      complexity_sum += r.complexity->total;
    }
    reward_sum += r.total_reward;
    tokens_sum += static_cast<double>(r.dwt_tokens_approx);
    if (r.similarity) {
      ++sim.count;
      sim.mse += r.similarity->mse;
      sim.psnr += r.similarity->psnr;
      sim.ssim += r.similarity->ssim;
      if (r.similarity->embed_cos) {
        ++embed_count;
        embed_sum += *r.similarity->embed_cos;
      }
    }
  }
  const double n = static_cast<double>(records.size());
  report.validity_rate_pct = 100.0 * static_cast<double>(renderable) / n;
  report.dwt_cover_pct = 100.0 * static_cast<double>(valid_dwt) / n;
  report.mean_complexity = parsed ? static_cast<double>(complexity_sum) / static_cast<double>(parsed) : 0.0;
  report.mean_semantic = renderable ? semantic_sum / static_cast<double>(renderable) : 0.0;
  report.mean_aesthetic = renderable ? aesthetic_sum / static_cast<double>(renderable) : 0.0;
  report.mean_reward = reward_sum / n;
  report.mean_dwt_tokens_approx = tokens_sum / n;
  if (sim.count) {
    const double c = static_cast<double>(sim.count);
    sim.mse /= c;
    sim.psnr /= c;
    sim.ssim /= c;
    if (embed_count) sim.embed_cos = embed_sum / static_cast<double>(embed_count);
    report.raster_similarity = sim;
  }
  if (features_a && features_b) report.fid = fid(*features_a, *features_b);
  return report;
}

}  // namespace svgr
