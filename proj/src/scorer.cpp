#include "svgr/scorer.h"

#include <cmath>

#include "svgr/error.h"
#include "svgr/png.h"

namespace svgr {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::kInvalidArgument, "embedding must have positive dimension");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "embedding contains a non-finite value");
  }
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()), seed);
}

std::vector<double> mock_embedding(std::uint64_t hash, std::size_t dim) {
  std::uint64_t state = hash;
  auto next = [&state] {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::vector<double> v(dim);
  double norm2 = 0.0;
  for (auto& x : v) {
    x = 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
    norm2 += x * x;
  }
  if (norm2 == 0.0) {
    v[0] = 1.0;
    return v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

double mock_score(std::uint64_t hash) { return static_cast<double>(hash % 1000) / 999.0; }

EmbeddingVector MockScorer::embed_text(std::string_view text) {
  ++calls_;
  return EmbeddingVector(mock_embedding(fnv1a64(text), options_.dim));
}

EmbeddingVector MockScorer::embed_image(const RasterImage& image) {
  ++calls_;
  return EmbeddingVector(mock_embedding(fnv1a64(encode_png(image)), options_.dim));
}

double MockScorer::aesthetic(const RasterImage& image, std::string_view /*prompt*/) {
  ++calls_;
  if (options_.fixed_aesthetic) return *options_.fixed_aesthetic;
  return mock_score(fnv1a64(encode_png(image)));
}

double MockScorer::consistency(const RasterImage& image, std::string_view prompt, std::string_view dwt_text) {
  ++calls_;
  if (options_.fixed_consistency) return *options_.fixed_consistency;
  std::uint64_t h = fnv1a64(encode_png(image));
  h = fnv1a64(prompt, h);
  h = fnv1a64(dwt_text, h);
  return mock_score(h);
}

}  // namespace svgr
