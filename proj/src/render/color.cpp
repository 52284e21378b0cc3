#include "color.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../text_util.h"

namespace svgr::detail {

namespace {

struct NamedColor {
  std::string_view name;
  std::uint32_t rgb;
};

// Sorted by name for binary search.
constexpr std::array<NamedColor, 148> kNamedColors = {{
    {"aliceblue", 0xf0f8ff},
    {"antiquewhite", 0xfaebd7},
    {"aqua", 0x00ffff},
    {"aquamarine", 0x7fffd4},
    {"azure", 0xf0ffff},
    {"beige", 0xf5f5dc},
    {"bisque", 0xffe4c4},
    {"black", 0x000000},
    {"blanchedalmond", 0xffebcd},
    {"blue", 0x0000ff},
    {"blueviolet", 0x8a2be2},
    {"brown", 0xa52a2a},
    {"burlywood", 0xdeb887},
    {"cadetblue", 0x5f9ea0},
    {"chartreuse", 0x7fff00},
    {"chocolate", 0xd2691e},
    {"coral", 0xff7f50},
    {"cornflowerblue", 0x6495ed},
    {"cornsilk", 0xfff8dc},
    {"crimson", 0xdc143c},
    {"cyan", 0x00ffff},
    {"darkblue", 0x00008b},
    {"darkcyan", 0x008b8b},
    {"darkgoldenrod", 0xb8860b},
    {"darkgray", 0xa9a9a9},
    {"darkgreen", 0x006400},
    {"darkgrey", 0xa9a9a9},
    {"darkkhaki", 0xbdb76b},
    {"darkmagenta", 0x8b008b},
    {"darkolivegreen", 0x556b2f},
    {"darkorange", 0xff8c00},
    {"darkorchid", 0x9932cc},
    {"darkred", 0x8b0000},
    {"darksalmon", 0xe9967a},
    {"darkseagreen", 0x8fbc8f},
    {"darkslateblue", 0x483d8b},
    {"darkslategray", 0x2f4f4f},
    {"darkslategrey", 0x2f4f4f},
    {"darkturquoise", 0x00ced1},
    {"darkviolet", 0x9400d3},
    {"deeppink", 0xff1493},
    {"deepskyblue", 0x00bfff},
    {"dimgray", 0x696969},
    {"dimgrey", 0x696969},
    {"dodgerblue", 0x1e90ff},
    {"firebrick", 0xb22222},
    {"floralwhite", 0xfffaf0},
    {"forestgreen", 0x228b22},
    {"fuchsia", 0xff00ff},
    {"gainsboro", 0xdcdcdc},
    {"ghostwhite", 0xf8f8ff},
    {"gold", 0xffd700},
    {"goldenrod", 0xdaa520},
    {"gray", 0x808080},
    {"green", 0x008000},
    {"greenyellow", 0xadff2f},
    {"grey", 0x808080},
    {"honeydew", 0xf0fff0},
    {"hotpink", 0xff69b4},
    {"indianred", 0xcd5c5c},
    {"indigo", 0x4b0082},
    {"ivory", 0xfffff0},
    {"khaki", 0xf0e68c},
    {"lavender", 0xe6e6fa},
    {"lavenderblush", 0xfff0f5},
    {"lawngreen", 0x7cfc00},
    {"lemonchiffon", 0xfffacd},
    {"lightblue", 0xadd8e6},
    {"lightcoral", 0xf08080},
    {"lightcyan", 0xe0ffff},
    {"lightgoldenrodyellow", 0xfafad2},
    {"lightgray", 0xd3d3d3},
    {"lightgreen", 0x90ee90},
    {"lightgrey", 0xd3d3d3},
    {"lightpink", 0xffb6c1},
    {"lightsalmon", 0xffa07a},
    {"lightseagreen", 0x20b2aa},
    {"lightskyblue", 0x87cefa},
    {"lightslategray", 0x778899},
    {"lightslategrey", 0x778899},
    {"lightsteelblue", 0xb0c4de},
    {"lightyellow", 0xffffe0},
    {"lime", 0x00ff00},
    {"limegreen", 0x32cd32},
    {"linen", 0xfaf0e6},
    {"magenta", 0xff00ff},
    {"maroon", 0x800000},
    {"mediumaquamarine", 0x66cdaa},
    {"mediumblue", 0x0000cd},
    {"mediumorchid", 0xba55d3},
    {"mediumpurple", 0x9370db},
    {"mediumseagreen", 0x3cb371},
    {"mediumslateblue", 0x7b68ee},
    {"mediumspringgreen", 0x00fa9a},
    {"mediumturquoise", 0x48d1cc},
    {"mediumvioletred", 0xc71585},
    {"midnightblue", 0x191970},
    {"mintcream", 0xf5fffa},
    {"mistyrose", 0xffe4e1},
    {"moccasin", 0xffe4b5},
    {"navajowhite", 0xffdead},
    {"navy", 0x000080},
    {"oldlace", 0xfdf5e6},
    {"olive", 0x808000},
    {"olivedrab", 0x6b8e23},
    {"orange", 0xffa500},
    {"orangered", 0xff4500},
    {"orchid", 0xda70d6},
    {"palegoldenrod", 0xeee8aa},
    {"palegreen", 0x98fb98},
    {"paleturquoise", 0xafeeee},
    {"palevioletred", 0xdb7093},
    {"papayawhip", 0xffefd5},
    {"peachpuff", 0xffdab9},
    {"peru", 0xcd853f},
    {"pink", 0xffc0cb},
    {"plum", 0xdda0dd},
    {"powderblue", 0xb0e0e6},
    {"purple", 0x800080},
    {"rebeccapurple", 0x663399},
    {"red", 0xff0000},
    {"rosybrown", 0xbc8f8f},
    {"royalblue", 0x4169e1},
    {"saddlebrown", 0x8b4513},
    {"salmon", 0xfa8072},
    {"sandybrown", 0xf4a460},
    {"seagreen", 0x2e8b57},
    {"seashell", 0xfff5ee},
    {"sienna", 0xa0522d},
    {"silver", 0xc0c0c0},
    {"skyblue", 0x87ceeb},
    {"slateblue", 0x6a5acd},
    {"slategray", 0x708090},
    {"slategrey", 0x708090},
    {"snow", 0xfffafa},
    {"springgreen", 0x00ff7f},
    {"steelblue", 0x4682b4},
    {"tan", 0xd2b48c},
    {"teal", 0x008080},
    {"thistle", 0xd8bfd8},
    {"tomato", 0xff6347},
    {"turquoise", 0x40e0d0},
    {"violet", 0xee82ee},
    {"wheat", 0xf5deb3},
    {"white", 0xffffff},
    {"whitesmoke", 0xf5f5f5},
    {"yellow", 0xffff00},
    {"yellowgreen", 0x9acd32},
}};

Color from_rgb24(std::uint32_t rgb) {
  return Color{((rgb >> 16) & 0xFF) / 255.0, ((rgb >> 8) & 0xFF) / 255.0, (rgb & 0xFF) / 255.0, 1.0};
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::optional<Color> parse_hex(std::string_view hex) {
  std::array<int, 8> d{};
  if (hex.size() != 3 && hex.size() != 4 && hex.size() != 6 && hex.size() != 8) return std::nullopt;
  for (std::size_t i = 0; i < hex.size(); ++i) {
    d[i] = hex_value(hex[i]);
    if (d[i] < 0) return std::nullopt;
  }
  if (hex.size() <= 4) {
    Color c{d[0] * 17 / 255.0, d[1] * 17 / 255.0, d[2] * 17 / 255.0, 1.0};
    if (hex.size() == 4) c.a = d[3] * 17 / 255.0;
    return c;
  }
  Color c{(d[0] * 16 + d[1]) / 255.0, (d[2] * 16 + d[3]) / 255.0, (d[4] * 16 + d[5]) / 255.0, 1.0};
  if (hex.size() == 8) c.a = (d[6] * 16 + d[7]) / 255.0;
  return c;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Splits "a, b, c" or "a b c / d" function arguments.
std::optional<std::vector<std::string>> split_args(std::string_view inner) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : inner) {
    if (ch == ',' || ch == '/' || is_space(ch)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Number or percentage; `percent_scale` maps 100% to the channel maximum.
std::optional<double> parse_component(std::string_view s, double percent_scale) {
  bool percent = !s.empty() && s.back() == '%';
  if (percent) s.remove_suffix(1);
  Scanner sc(s);
  auto v = sc.number();
  if (!v || !sc.done()) return std::nullopt;
  return percent ? *v / 100.0 * percent_scale : *v;
}

double hue_to_rgb(double p, double q, double t) {
  if (t < 0) t += 1;
  if (t > 1) t -= 1;
  if (t < 1.0 / 6) return p + (q - p) * 6 * t;
  if (t < 0.5) return q;
  if (t < 2.0 / 3) return p + (q - p) * (2.0 / 3 - t) * 6;
  return p;
}

}  // namespace

std::optional<Color> parse_color(std::string_view value) {
  value = trim(value);
  if (value.empty()) return std::nullopt;
  if (value.front() == '#') return parse_hex(value.substr(1));
  std::string lower = to_lower(value);
  if (lower == "transparent") return Color{0, 0, 0, 0};
  auto open = lower.find('(');
  if (open != std::string::npos) {
    if (lower.back() != ')') return std::nullopt;
    std::string fn(trim(std::string_view(lower).substr(0, open)));
    auto args = split_args(std::string_view(lower).substr(open + 1, lower.size() - open - 2));
    if (!args || (args->size() != 3 && args->size() != 4)) return std::nullopt;
    double alpha = 1.0;
    if (args->size() == 4) {
      auto a = parse_component((*args)[3], 1.0);
      if (!a) return std::nullopt;
      alpha = clamp01(*a);
    }
    if (fn == "rgb" || fn == "rgba") {
      std::array<double, 3> ch{};
      for (int i = 0; i < 3; ++i) {
        auto v = parse_component((*args)[i], 255.0);
        if (!v) return std::nullopt;
        ch[i] = clamp01(*v / 255.0);
      }
      return Color{ch[0], ch[1], ch[2], alpha};
    }
    if (fn == "hsl" || fn == "hsla") {
      std::string hue_text = (*args)[0];
      if (hue_text.size() > 3 && hue_text.substr(hue_text.size() - 3) == "deg") hue_text.resize(hue_text.size() - 3);
      auto h = parse_component(hue_text, 1.0);
      auto s = parse_component((*args)[1], 1.0);
      auto l = parse_component((*args)[2], 1.0);
      if (!h || !s || !l) return std::nullopt;
      double hue = std::fmod(std::fmod(*h, 360.0) + 360.0, 360.0) / 360.0;
      double sat = clamp01(*s), light = clamp01(*l);
      if (sat == 0.0) return Color{light, light, light, alpha};
      double q = light < 0.5 ? light * (1 + sat) : light + sat - light * sat;
      double p = 2 * light - q;
      return Color{hue_to_rgb(p, q, hue + 1.0 / 3), hue_to_rgb(p, q, hue), hue_to_rgb(p, q, hue - 1.0 / 3), alpha};
    }
    return std::nullopt;
  }
  auto it = std::lower_bound(kNamedColors.begin(), kNamedColors.end(), lower,
                             [](const NamedColor& c, const std::string& n) { return c.name < n; });
  if (it != kNamedColors.end() && it->name == lower) return from_rgb24(it->rgb);
  return std::nullopt;
}

}  // namespace svgr::detail
