#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace svgr::detail {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// 2-D affine map [a c e; b d f; 0 0 1], SVG matrix() ordering.
struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  Point apply(Point p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }

  // this * other: `other` is applied first.
  Affine operator*(const Affine& o) const {
    return {a * o.a + c * o.b,     b * o.a + d * o.b,     a * o.c + c * o.d,
            b * o.c + d * o.d,     a * o.e + c * o.f + e, b * o.e + d * o.f + f};
  }

  double determinant() const { return a * d - b * c; }
  // Geometric mean scale factor, used for stroke widths and tolerances.
  double mean_scale() const { return std::sqrt(std::fabs(determinant())); }

  static Affine translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
  static Affine scale(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
  static Affine rotate_degrees(double deg) {
    double r = deg * std::numbers::pi / 180.0;
    return {std::cos(r), std::sin(r), -std::sin(r), std::cos(r), 0, 0};
  }
};

// A flattened subpath in device space.
struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

// Parses an SVG transform list; nullopt if malformed.
std::optional<Affine> parse_transform(std::string_view text);

}  // namespace svgr::detail
