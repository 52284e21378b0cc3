#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svgr/svg_document.h"

namespace svgr {

inline constexpr int kDefaultRasterSize = 256;

// Row-major RGBA8, straight alpha.
class RasterImage {
 public:
  // Fully transparent image. Throws Error(kInvalidArgument) unless both
  // dimensions are positive.
  RasterImage(int width, int height);
  // Takes ownership of `pixels`; its size must be width * height * 4.
  RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint8_t>& mutable_pixels() { return pixels_; }

  const std::uint8_t* pixel(int x, int y) const {
    return &pixels_[(static_cast<std::size_t>(y) * width_ + x) * 4];
  }

  bool operator==(const RasterImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

enum class FailureStage { kParseError, kNonSvgRoot, kRenderError, kEmptyCanvas };

std::string_view failure_stage_name(FailureStage stage);

struct RenderVerdict {
  bool renderable = false;
  std::optional<FailureStage> failure_stage;
  std::optional<RasterImage> raster;
  // Diagnostic for the failing stage; empty when renderable.
  std::string detail;
};

// Rasterizes `doc` into a width x height image starting from a transparent
// background. The viewBox (or intrinsic width/height) is fitted to the
// raster honoring preserveAspectRatio.
//
// Supported: basic shapes, paths (all commands, arcs included), groups,
// nested svg, use/symbol, transforms, presentation attributes and inline
// style declarations, solid colors, gradients as their mean stop color, and
// text as glyph-sized boxes. Clipping, masks, filters, markers, images and
// stylesheets are ignored.
//
// Throws Error(kRenderError) for constructs the backend rejects: malformed
// path data, points lists, lengths or transforms, negative sizes, and
// unresolvable or cyclic references.
RasterImage render_raster(const SvgDocument& doc, int width, int height);

// All pixels identical (fully transparent output included).
bool is_empty_canvas(const RasterImage& image);

// Parse, render and emptiness check in one step. Never throws for bad
// input; the first failing stage is recorded in the verdict.
RenderVerdict check_renderable(std::string_view text, int raster_size = kDefaultRasterSize);

}  // namespace svgr
