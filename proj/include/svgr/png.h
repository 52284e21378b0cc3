#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "svgr/raster.h"

namespace svgr {

// RGBA8 PNG with uncompressed (stored) deflate blocks, so the encoded bytes
// depend only on the pixels and are identical on every host.
std::vector<std::uint8_t> encode_png(const RasterImage& image);

void write_png(const RasterImage& image, const std::filesystem::path& path);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

}  // namespace svgr
