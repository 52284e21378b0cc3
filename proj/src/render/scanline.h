#pragma once

#include <cstdint>
#include <vector>

#include "color.h"
#include "geometry.h"

namespace svgr::detail {

enum class FillRule { kNonZero, kEvenOdd };
enum class LineCap { kButt, kRound, kSquare };

// Per-pixel sample counts for one shape, 4x4 supersampling (0..16).
class CoverageMask {
 public:
  static constexpr int kSubsamples = 4;
  static constexpr int kMaxCoverage = kSubsamples * kSubsamples;

  CoverageMask(int width, int height)
      : width_(width), height_(height), counts_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint8_t at(int x, int y) const { return counts_[static_cast<std::size_t>(y) * width_ + x]; }
  void add(int x, int y) { ++counts_[static_cast<std::size_t>(y) * width_ + x]; }
  void clear() { std::fill(counts_.begin(), counts_.end(), 0); }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> counts_;
};

// Scan-converts the polylines (each implicitly closed) into `mask`.
// `mask` must be clear; a sample is set at most once.
void fill_polylines(const std::vector<Polyline>& paths, FillRule rule, CoverageMask& mask);

// Expands polylines into closed outlines, all with the same orientation, so
// filling them with the non-zero rule paints their union. Joins are round.
std::vector<Polyline> stroke_outline(const std::vector<Polyline>& paths, double width, LineCap cap);

// Source-over composite of `color` (alpha pre-scaled by `opacity`) through
// `mask` onto a straight-alpha RGBA8 buffer.
void composite(const CoverageMask& mask, const Color& color, double opacity, std::vector<std::uint8_t>& rgba);

}  // namespace svgr::detail
