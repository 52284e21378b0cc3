#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svgr/raster.h"

namespace svgr {

class EmbeddingVector {
 public:
  // Throws Error(kInvalidArgument) for an empty or non-finite vector.
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

enum class ScorerMode { kRemote, kMock };

// Neural scorers behind one contract: text/image embeddings, aesthetic
// preference and visual-reasoning consistency. Scores are in [0,1].
// Implementations must accept concurrent calls.
class ScorerClient {
 public:
  virtual ~ScorerClient() = default;

  virtual ScorerMode mode() const = 0;
  virtual EmbeddingVector embed_text(std::string_view text) = 0;
  virtual EmbeddingVector embed_image(const RasterImage& image) = 0;
  virtual double aesthetic(const RasterImage& image, std::string_view prompt) = 0;
  virtual double consistency(const RasterImage& image, std::string_view prompt, std::string_view dwt_text) = 0;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Mock-protocol primitives shared with the scorer sidecar:
//  - embedding: splitmix64 stream seeded by the hash; component i is
//    2 * ((next() >> 11) * 2^-53) - 1; then L2-normalized.
//  - score: (hash mod 1000) / 999.
std::vector<double> mock_embedding(std::uint64_t hash, std::size_t dim);
double mock_score(std::uint64_t hash);

// Deterministic in-process scorer. Hash inputs: text bytes (embed_text),
// PNG bytes from encode_png (embed_image, aesthetic), and PNG bytes followed
// by prompt and dwt bytes (consistency).
class MockScorer final : public ScorerClient {
 public:
  struct Options {
    std::size_t dim = 64;
    std::optional<double> fixed_aesthetic;
    std::optional<double> fixed_consistency;
  };

  MockScorer() : MockScorer(Options{}) {}
  explicit MockScorer(Options options) : options_(options) {}

  ScorerMode mode() const override { return ScorerMode::kMock; }
  EmbeddingVector embed_text(std::string_view text) override;
  EmbeddingVector embed_image(const RasterImage& image) override;
  double aesthetic(const RasterImage& image, std::string_view prompt) override;
  double consistency(const RasterImage& image, std::string_view prompt, std::string_view dwt_text) override;

  // Total calls across all endpoints.
  std::size_t calls() const { return calls_.load(); }

 private:
  Options options_;
  std::atomic<std::size_t> calls_{0};
};

// HTTP client for the scorer sidecar: POST {base_url}/v1/score with a JSON
// body {"kind", "text"?, "image_png_base64"?, "dwt_text"?}; the response
// carries "embedding"/"dim" or "score" plus "model_id". Any transport error,
// non-200 status or malformed response throws Error(kScorerUnavailable).
class RemoteScorer final : public ScorerClient {
 public:
  explicit RemoteScorer(std::string base_url, int max_in_flight = 8, int timeout_seconds = 60);

  ScorerMode mode() const override { return ScorerMode::kRemote; }
  EmbeddingVector embed_text(std::string_view text) override;
  EmbeddingVector embed_image(const RasterImage& image) override;
  double aesthetic(const RasterImage& image, std::string_view prompt) override;
  double consistency(const RasterImage& image, std::string_view prompt, std::string_view dwt_text) override;

  // GET /v1/health; returns the reported mode ("mock" or "real").
  std::string health();

  const std::string& base_url() const { return base_url_; }

 private:
  std::string post(const std::string& body);

  std::string base_url_;
  int timeout_seconds_;
  std::counting_semaphore<1024> in_flight_;
};

}  // namespace svgr
