#pragma once

#include <optional>
#include <string_view>

namespace svgr::detail {

// Straight (non-premultiplied) color, channels in [0,1].
struct Color {
  double r = 0.0, g = 0.0, b = 0.0, a = 1.0;
};

// CSS color syntax used in SVG: named colors, #rgb, #rgba, #rrggbb,
// #rrggbbaa, rgb()/rgba() with numbers or percentages, hsl()/hsla(),
// "transparent". Returns nullopt if the value is not a color.
std::optional<Color> parse_color(std::string_view value);

}  // namespace svgr::detail
