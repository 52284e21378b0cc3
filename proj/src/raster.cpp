#include "svgr/raster.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "render/color.h"
#include "render/geometry.h"
#include "render/scanline.h"
#include "svgr/error.h"
#include "svgr/path_data.h"
#include "text_util.h"

namespace svgr {

RasterImage::RasterImage(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be positive");
  }
  pixels_.assign(static_cast<std::size_t>(width) * height * 4, 0);
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 4) {
    throw Error(ErrorCode::kInvalidArgument, "pixel buffer length must be width * height * 4");
  }
}

std::string_view failure_stage_name(FailureStage stage) {
  switch (stage) {
    case FailureStage::kParseError: return "ParseError";
    case FailureStage::kNonSvgRoot: return "NonSvgRoot";
    case FailureStage::kRenderError: return "RenderError";
    case FailureStage::kEmptyCanvas: return "EmptyCanvas";
  }
  return "Unknown";
}

namespace {

using detail::Affine;
using detail::Color;
using detail::CoverageMask;
using detail::FillRule;
using detail::LineCap;
using detail::Point;
using detail::Polyline;

constexpr int kMaxUseDepth = 32;
constexpr int kMaxTreeDepth = 600;
constexpr double kFlattenTolerance = 1.0;  // device pixels per segment

[[noreturn]] void render_error(const std::string& what) {
  throw Error(ErrorCode::kRenderError, what);
}

struct Paint {
  bool none = true;
  Color color;

  static Paint solid(Color c) { return Paint{false, c}; }
};

struct Style {
  Paint fill = Paint::solid(Color{0, 0, 0, 1});
  Paint stroke;
  double fill_opacity = 1.0;
  double stroke_opacity = 1.0;
  double stroke_width = 1.0;
  FillRule fill_rule = FillRule::kNonZero;
  LineCap cap = LineCap::kButt;
  Color color{0, 0, 0, 1};
  double font_size = 16.0;
  bool visible = true;
  double opacity = 1.0;
  std::string text_anchor = "start";
};

// Size of the nearest viewport in user units, for percentage lengths.
struct Viewport {
  double width;
  double height;

  double diagonal() const { return std::sqrt((width * width + height * height) / 2.0); }
};

enum class Axis { kX, kY, kDiagonal };

double axis_reference(const Viewport& vp, Axis axis) {
  switch (axis) {
    case Axis::kX: return vp.width;
    case Axis::kY: return vp.height;
    case Axis::kDiagonal: return vp.diagonal();
  }
  return vp.width;
}

std::optional<double> try_length(std::string_view text, double reference, double font_size) {
  detail::Scanner sc(detail::trim(text));
  auto v = sc.number();
  if (!v) return std::nullopt;
  std::string unit = detail::to_lower(sc.rest());
  double scale;
  if (unit.empty() || unit == "px") scale = 1.0;
  else if (unit == "%") scale = reference / 100.0;
  else if (unit == "pt") scale = 4.0 / 3.0;
  else if (unit == "pc") scale = 16.0;
  else if (unit == "mm") scale = 96.0 / 25.4;
  else if (unit == "cm") scale = 96.0 / 2.54;
  else if (unit == "in") scale = 96.0;
  else if (unit == "em") scale = font_size;
  else if (unit == "ex") scale = font_size / 2.0;
  else return std::nullopt;
  return *v * scale;
}

std::vector<std::pair<std::string, std::string>> parse_style_attribute(std::string_view style) {
  std::vector<std::pair<std::string, std::string>> out;
  while (!style.empty()) {
    auto semi = style.find(';');
    std::string_view decl = style.substr(0, semi);
    style = semi == std::string_view::npos ? std::string_view{} : style.substr(semi + 1);
    auto colon = decl.find(':');
    if (colon == std::string_view::npos) continue;
    std::string name = detail::to_lower(detail::trim(decl.substr(0, colon)));
    std::string_view value = detail::trim(decl.substr(colon + 1));
    if (auto bang = value.find("!important"); bang != std::string_view::npos) {
      value = detail::trim(value.substr(0, bang));
    }
    out.emplace_back(std::move(name), std::string(value));
  }
  return out;
}

double parse_opacity(const std::optional<std::string>& value, double fallback) {
  if (!value) return fallback;
  std::string_view v = detail::trim(*value);
  bool percent = !v.empty() && v.back() == '%';
  if (percent) v.remove_suffix(1);
  detail::Scanner sc(v);
  auto n = sc.number();
  if (!n || !sc.done()) return fallback;
  return std::clamp(percent ? *n / 100.0 : *n, 0.0, 1.0);
}

// Accumulates device-space polylines from user-space drawing commands.
class PathSink {
 public:
  explicit PathSink(const Affine& ctm) : ctm_(ctm), scale_(std::max(ctm.mean_scale(), 1e-12)) {}

  void move_to(Point p) {
    paths_.push_back(Polyline{{ctm_.apply(p)}, false});
    open_ = true;
    start_ = current_ = p;
  }

  void line_to(Point p) {
    ensure_open();
    paths_.back().points.push_back(ctm_.apply(p));
    current_ = p;
  }

  void cubic_to(Point c1, Point c2, Point p) {
    ensure_open();
    Point d0 = ctm_.apply(current_), d1 = ctm_.apply(c1), d2 = ctm_.apply(c2), d3 = ctm_.apply(p);
    double len = dist(d0, d1) + dist(d1, d2) + dist(d2, d3);
    int n = segments_for(len);
    for (int i = 1; i <= n; ++i) {
      double t = static_cast<double>(i) / n, u = 1.0 - t;
      double a = u * u * u, b = 3 * u * u * t, c = 3 * u * t * t, d = t * t * t;
      paths_.back().points.push_back({a * d0.x + b * d1.x + c * d2.x + d * d3.x,
                                      a * d0.y + b * d1.y + c * d2.y + d * d3.y});
    }
    current_ = p;
  }

  void quad_to(Point c, Point p) {
    ensure_open();
    Point d0 = ctm_.apply(current_), d1 = ctm_.apply(c), d2 = ctm_.apply(p);
    int n = segments_for(dist(d0, d1) + dist(d1, d2));
    for (int i = 1; i <= n; ++i) {
      double t = static_cast<double>(i) / n, u = 1.0 - t;
      paths_.back().points.push_back({u * u * d0.x + 2 * u * t * d1.x + t * t * d2.x,
                                      u * u * d0.y + 2 * u * t * d1.y + t * t * d2.y});
    }
    current_ = p;
  }

  // Elliptical arc in endpoint parameterization, converted to center form
  // with out-of-range radii scaled up.
  void arc_to(double rx, double ry, double x_axis_rotation_deg, bool large_arc, bool sweep, Point p) {
    ensure_open();
    Point p0 = current_;
    if (p0.x == p.x && p0.y == p.y) return;
    rx = std::fabs(rx);
    ry = std::fabs(ry);
    if (rx == 0.0 || ry == 0.0) {
      line_to(p);
      return;
    }
    const double phi = x_axis_rotation_deg * std::numbers::pi / 180.0;
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double dx2 = (p0.x - p.x) / 2.0, dy2 = (p0.y - p.y) / 2.0;
    const double x1p = cphi * dx2 + sphi * dy2;
    const double y1p = -sphi * dx2 + cphi * dy2;
    double lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
    if (lambda > 1.0) {
      double s = std::sqrt(lambda);
      rx *= s;
      ry *= s;
    }
    double num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p;
    double den = rx * rx * y1p * y1p + ry * ry * x1p * x1p;
    double coef = den == 0.0 ? 0.0 : std::sqrt(std::max(0.0, num / den));
    if (large_arc == sweep) coef = -coef;
    const double cxp = coef * rx * y1p / ry;
    const double cyp = -coef * ry * x1p / rx;
    const double cx = cphi * cxp - sphi * cyp + (p0.x + p.x) / 2.0;
    const double cy = sphi * cxp + cphi * cyp + (p0.y + p.y) / 2.0;
    auto angle = [](double ux, double uy, double vx, double vy) {
      return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    };
    const double theta1 = angle(1, 0, (x1p - cxp) / rx, (y1p - cyp) / ry);
    double dtheta = angle((x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx, (-y1p - cyp) / ry);
    if (!sweep && dtheta > 0) dtheta -= 2 * std::numbers::pi;
    if (sweep && dtheta < 0) dtheta += 2 * std::numbers::pi;
    int n = segments_for(std::fabs(dtheta) * std::max(rx, ry) * scale_);
    for (int i = 1; i <= n; ++i) {
      double t = theta1 + dtheta * i / n;
      Point q = i == n ? p
                       : Point{cx + rx * cphi * std::cos(t) - ry * sphi * std::sin(t),
                               cy + rx * sphi * std::cos(t) + ry * cphi * std::sin(t)};
      paths_.back().points.push_back(ctm_.apply(q));
    }
    current_ = p;
  }

  void ellipse(double cx, double cy, double rx, double ry) {
    int n = std::max(segments_for(2 * std::numbers::pi * std::max(rx, ry) * scale_), 16);
    std::vector<Point> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      double t = 2 * std::numbers::pi * i / n;
      pts.push_back(ctm_.apply({cx + rx * std::cos(t), cy + ry * std::sin(t)}));
    }
    paths_.push_back(Polyline{std::move(pts), true});
    open_ = false;
  }

  void close() {
    if (open_) paths_.back().closed = true;
    open_ = false;
    current_ = start_;
  }

  Point current() const { return current_; }
  std::vector<Polyline>& paths() { return paths_; }

 private:
  static double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

  static int segments_for(double device_length) {
    if (!std::isfinite(device_length)) return 1;
    return std::clamp(static_cast<int>(std::ceil(device_length / kFlattenTolerance)), 1, 512);
  }

  void ensure_open() {
    if (!open_) move_to(current_);
  }

  Affine ctm_;
  double scale_;
  std::vector<Polyline> paths_;
  bool open_ = false;
  Point start_{};
  Point current_{};
};

void append_path_data(PathSink& sink, std::string_view d) {
  std::vector<PathCommand> commands;
  try {
    commands = parse_path_data(d);
  } catch (const Error& e) {
    render_error(e.what());
  }
  Point cur{0, 0};
  Point last_cubic{0, 0}, last_quad{0, 0};
  char prev = 0;
  for (const auto& cmd : commands) {
    const bool rel = std::islower(static_cast<unsigned char>(cmd.letter)) != 0;
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd.letter)));
    const auto& a = cmd.args;
    auto pt = [&](std::size_t i) { return rel ? Point{cur.x + a[i], cur.y + a[i + 1]} : Point{a[i], a[i + 1]}; };
    switch (up) {
      case 'M': cur = pt(0); sink.move_to(cur); break;
      case 'L': cur = pt(0); sink.line_to(cur); break;
      case 'H': cur.x = rel ? cur.x + a[0] : a[0]; sink.line_to(cur); break;
      case 'V': cur.y = rel ? cur.y + a[0] : a[0]; sink.line_to(cur); break;
      case 'C': {
        Point c1 = pt(0), c2 = pt(2), p = pt(4);
        sink.cubic_to(c1, c2, p);
        last_cubic = c2;
        cur = p;
        break;
      }
      case 'S': {
        Point c1 = (prev == 'C' || prev == 'S') ? Point{2 * cur.x - last_cubic.x, 2 * cur.y - last_cubic.y} : cur;
        Point c2 = pt(0), p = pt(2);
        sink.cubic_to(c1, c2, p);
        last_cubic = c2;
        cur = p;
        break;
      }
      case 'Q': {
        Point c = pt(0), p = pt(2);
        sink.quad_to(c, p);
        last_quad = c;
        cur = p;
        break;
      }
      case 'T': {
        Point c = (prev == 'Q' || prev == 'T') ? Point{2 * cur.x - last_quad.x, 2 * cur.y - last_quad.y} : cur;
        Point p = pt(0);
        sink.quad_to(c, p);
        last_quad = c;
        cur = p;
        break;
      }
      case 'A': {
        Point p = pt(5);
        sink.arc_to(a[0], a[1], a[2], a[3] != 0.0, a[4] != 0.0, p);
        cur = p;
        break;
      }
      case 'Z':
        sink.close();
        cur = sink.current();
        break;
    }
    prev = up;
  }
}

std::size_t count_glyphs(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

class SceneRenderer {
 public:
  SceneRenderer(const SvgDocument& doc, int width, int height)
      : doc_(doc), image_(width, height), mask_(width, height) {
    index_ids(doc.root, 0);
  }

  RasterImage run() {
    const SvgElement& root = doc_.root;
    const double W = image_.width(), H = image_.height();
    std::optional<ViewBox> vb = doc_.view_box;
    if (!vb) {
      const std::string* w = root.attribute("width");
      const std::string* h = root.attribute("height");
      if (w && h && w->find('%') == std::string::npos && h->find('%') == std::string::npos) {
        auto wl = try_length(*w, W, 16.0);
        auto hl = try_length(*h, H, 16.0);
        if (wl && hl && *wl > 0 && *hl > 0) vb = ViewBox{0, 0, *wl, *hl};
      }
    }
    Affine base;
    Viewport vp{W, H};
    if (vb) {
      base = fit_view_box(*vb, 0, 0, W, H, attr(root, "preserveAspectRatio"));
      vp = {vb->width, vb->height};
    }
    Style style;
    apply_style(root, style, vp);
    if (const auto* t = root.attribute("transform")) base = base * transform_of(*t);
    render_children(root, style, base, vp, 0);
    return std::move(image_);
  }

 private:
  static const std::string* attr(const SvgElement& el, std::string_view name) { return el.attribute(name); }

  void index_ids(const SvgElement& el, int depth) {
    if (depth > kMaxTreeDepth) render_error("document nesting too deep");
    if (const auto* id = el.attribute("id")) ids_.emplace(*id, &el);
    for (const auto& child : el.children) index_ids(child, depth + 1);
  }

  const SvgElement* lookup_href(const SvgElement& el) const {
    const std::string* href = el.attribute("href");
    if (!href) href = el.attribute("xlink:href");
    if (!href) {
      for (const auto& [name, value] : el.attributes) {
        if (local_name(name) == "href") return lookup_fragment(value);
      }
      return nullptr;
    }
    return lookup_fragment(*href);
  }

  const SvgElement* lookup_fragment(std::string_view ref) const {
    ref = detail::trim(ref);
    if (ref.empty() || ref.front() != '#') return nullptr;
    auto it = ids_.find(std::string(ref.substr(1)));
    return it == ids_.end() ? nullptr : it->second;
  }

  static Affine transform_of(const std::string& text) {
    auto t = detail::parse_transform(text);
    if (!t) render_error("malformed transform '" + text + "'");
    return *t;
  }

  static Affine fit_view_box(const ViewBox& vb, double x, double y, double w, double h, const std::string* par) {
    std::string spec = par ? detail::to_lower(detail::trim(*par)) : "xmidymid meet";
    if (spec.rfind("defer", 0) == 0) spec = std::string(detail::trim(std::string_view(spec).substr(5)));
    double sx = w / vb.width, sy = h / vb.height;
    if (spec == "none") {
      return Affine::translate(x, y) * Affine::scale(sx, sy) * Affine::translate(-vb.min_x, -vb.min_y);
    }
    bool slice = spec.find("slice") != std::string::npos;
    double s = slice ? std::max(sx, sy) : std::min(sx, sy);
    double free_x = w - vb.width * s, free_y = h - vb.height * s;
    double ax = 0.5, ay = 0.5;
    if (spec.find("xmin") != std::string::npos) ax = 0.0;
    if (spec.find("xmax") != std::string::npos) ax = 1.0;
    if (spec.find("ymin") != std::string::npos) ay = 0.0;
    if (spec.find("ymax") != std::string::npos) ay = 1.0;
    return Affine::translate(x + free_x * ax, y + free_y * ay) * Affine::scale(s, s) *
           Affine::translate(-vb.min_x, -vb.min_y);
  }

  // Presentation attribute, overridden by an inline style declaration.
  static std::optional<std::string> property(const SvgElement& el,
                                             const std::vector<std::pair<std::string, std::string>>& decls,
                                             std::string_view name) {
    for (auto it = decls.rbegin(); it != decls.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    if (const auto* v = el.attribute(name)) return *v;
    return std::nullopt;
  }

  Color gradient_color(const SvgElement& gradient, int depth) const {
    std::vector<Color> stops;
    for (const auto& child : gradient.children) {
      if (child.tag != "stop") continue;
      std::vector<std::pair<std::string, std::string>> decls;
      if (const auto* s = child.attribute("style")) decls = parse_style_attribute(*s);
      auto sc = property(child, decls, "stop-color");
      Color c = sc ? detail::parse_color(*sc).value_or(Color{0, 0, 0, 1}) : Color{0, 0, 0, 1};
      c.a *= parse_opacity(property(child, decls, "stop-opacity"), 1.0);
      stops.push_back(c);
    }
    if (stops.empty()) {
      const SvgElement* parent = lookup_href(gradient);
      if (parent && depth < 16 && (parent->tag == "linearGradient" || parent->tag == "radialGradient")) {
        return gradient_color(*parent, depth + 1);
      }
      return Color{0, 0, 0, 0};
    }
    Color mean{0, 0, 0, 0};
    for (const auto& c : stops) {
      mean.r += c.r;
      mean.g += c.g;
      mean.b += c.b;
      mean.a += c.a;
    }
    const double n = static_cast<double>(stops.size());
    return Color{mean.r / n, mean.g / n, mean.b / n, mean.a / n};
  }

  Paint resolve_paint(std::string_view value, const Paint& inherited, const Style& style) const {
    value = detail::trim(value);
    if (value == "none") return Paint{};
    if (value == "inherit") return inherited;
    if (value == "currentColor" || value == "currentcolor") return Paint::solid(style.color);
    if (value.rfind("url(", 0) == 0) {
      auto close = value.find(')');
      if (close == std::string_view::npos) render_error("malformed paint '" + std::string(value) + "'");
      std::string_view ref = detail::trim(value.substr(4, close - 4));
      if (!ref.empty() && (ref.front() == '"' || ref.front() == '\'')) ref = ref.substr(1, ref.size() - 2);
      std::string_view fallback = detail::trim(value.substr(close + 1));
      const SvgElement* target = lookup_fragment(ref);
      if (target && (target->tag == "linearGradient" || target->tag == "radialGradient")) {
        return Paint::solid(gradient_color(*target, 0));
      }
      if (!fallback.empty()) return resolve_paint(fallback, inherited, style);
      if (!target) render_error("unresolved paint reference '" + std::string(ref) + "'");
      return Paint{};  // patterns and other paint servers are not drawn
    }
    return Paint::solid(detail::parse_color(value).value_or(Color{0, 0, 0, 1}));
  }

  void apply_style(const SvgElement& el, Style& style, const Viewport& vp) const {
    std::vector<std::pair<std::string, std::string>> decls;
    if (const auto* s = el.attribute("style")) decls = parse_style_attribute(*s);
    auto get = [&](std::string_view name) { return property(el, decls, name); };

    if (auto v = get("color")) {
      if (auto c = detail::parse_color(*v)) style.color = *c;
    }
    if (auto v = get("font-size")) {
      if (auto fs = try_length(*v, style.font_size, style.font_size)) style.font_size = *fs;
    }
    if (auto v = get("fill")) style.fill = resolve_paint(*v, style.fill, style);
    if (auto v = get("stroke")) style.stroke = resolve_paint(*v, style.stroke, style);
    style.fill_opacity = parse_opacity(get("fill-opacity"), style.fill_opacity);
    style.stroke_opacity = parse_opacity(get("stroke-opacity"), style.stroke_opacity);
    style.opacity *= parse_opacity(get("opacity"), 1.0);
    if (auto v = get("stroke-width")) {
      auto w = try_length(*v, vp.diagonal(), style.font_size);
      if (!w) render_error("invalid stroke-width '" + *v + "'");
      if (*w < 0) render_error("negative stroke-width");
      style.stroke_width = *w;
    }
    if (auto v = get("fill-rule")) {
      if (detail::trim(*v) == "evenodd") style.fill_rule = FillRule::kEvenOdd;
      else if (detail::trim(*v) == "nonzero") style.fill_rule = FillRule::kNonZero;
    }
    if (auto v = get("stroke-linecap")) {
      auto cap = detail::trim(*v);
      if (cap == "round") style.cap = LineCap::kRound;
      else if (cap == "square") style.cap = LineCap::kSquare;
      else if (cap == "butt") style.cap = LineCap::kButt;
    }
    if (auto v = get("visibility")) {
      auto vis = detail::trim(*v);
      if (vis == "hidden" || vis == "collapse") style.visible = false;
      else if (vis == "visible") style.visible = true;
    }
    if (auto v = get("text-anchor")) style.text_anchor = std::string(detail::trim(*v));
  }

  static bool hidden_by_display(const SvgElement& el) {
    if (const auto* d = el.attribute("display"); d && detail::trim(*d) == "none") return true;
    if (const auto* s = el.attribute("style")) {
      for (const auto& [name, value] : parse_style_attribute(*s)) {
        if (name == "display" && value == "none") return true;
      }
    }
    return false;
  }

  double length_attr(const SvgElement& el, std::string_view name, const Viewport& vp, Axis axis,
                     const Style& style, double fallback = 0.0) const {
    const std::string* v = el.attribute(name);
    if (!v) return fallback;
    auto len = try_length(*v, axis_reference(vp, axis), style.font_size);
    if (!len) render_error("invalid length " + std::string(name) + "='" + *v + "' on <" + el.tag + ">");
    return *len;
  }

  // First coordinate of a (possibly multi-valued) x/y text attribute.
  double first_coordinate(const SvgElement& el, std::string_view name, const Viewport& vp, Axis axis,
                          const Style& style) const {
    const std::string* v = el.attribute(name);
    if (!v) return 0.0;
    std::string_view s = detail::trim(*v);
    auto end = s.find_first_of(" ,\t\n\r");
    auto len = try_length(s.substr(0, end), axis_reference(vp, axis), style.font_size);
    if (!len) render_error("invalid coordinate " + std::string(name) + "='" + *v + "'");
    return *len;
  }

  void paint(std::vector<Polyline>& paths, const Style& style, const Affine& ctm) {
    if (!style.visible || paths.empty()) return;
    if (!style.fill.none) {
      mask_.clear();
      detail::fill_polylines(paths, style.fill_rule, mask_);
      detail::composite(mask_, style.fill.color, style.fill_opacity * style.opacity, image_.mutable_pixels());
    }
    if (!style.stroke.none && style.stroke_width > 0) {
      auto outline = detail::stroke_outline(paths, style.stroke_width * ctm.mean_scale(), style.cap);
      mask_.clear();
      detail::fill_polylines(outline, FillRule::kNonZero, mask_);
      detail::composite(mask_, style.stroke.color, style.stroke_opacity * style.opacity, image_.mutable_pixels());
    }
  }

  void render_children(const SvgElement& el, const Style& style, const Affine& ctm, const Viewport& vp, int depth) {
    for (const auto& child : el.children) render_element(child, style, ctm, vp, depth + 1);
  }

  void render_shape(const SvgElement& el, const Style& style, const Affine& ctm, const Viewport& vp) {
    PathSink sink(ctm);
    const std::string& tag = el.tag;
    if (tag == "rect") {
      double x = length_attr(el, "x", vp, Axis::kX, style);
      double y = length_attr(el, "y", vp, Axis::kY, style);
      double w = length_attr(el, "width", vp, Axis::kX, style);
      double h = length_attr(el, "height", vp, Axis::kY, style);
      if (w < 0 || h < 0) render_error("negative rect size");
      if (w == 0 || h == 0) return;
      bool has_rx = el.has_attribute("rx"), has_ry = el.has_attribute("ry");
      double rx = length_attr(el, "rx", vp, Axis::kX, style);
      double ry = length_attr(el, "ry", vp, Axis::kY, style);
      if (rx < 0 || ry < 0) render_error("negative rect corner radius");
      if (has_rx && !has_ry) ry = rx;
      if (has_ry && !has_rx) rx = ry;
      rx = std::min(rx, w / 2);
      ry = std::min(ry, h / 2);
      if (rx > 0 && ry > 0) {
        sink.move_to({x + rx, y});
        sink.line_to({x + w - rx, y});
        sink.arc_to(rx, ry, 0, false, true, {x + w, y + ry});
        sink.line_to({x + w, y + h - ry});
        sink.arc_to(rx, ry, 0, false, true, {x + w - rx, y + h});
        sink.line_to({x + rx, y + h});
        sink.arc_to(rx, ry, 0, false, true, {x, y + h - ry});
        sink.line_to({x, y + ry});
        sink.arc_to(rx, ry, 0, false, true, {x + rx, y});
      } else {
        sink.move_to({x, y});
        sink.line_to({x + w, y});
        sink.line_to({x + w, y + h});
        sink.line_to({x, y + h});
      }
      sink.close();
    } else if (tag == "circle") {
      double r = length_attr(el, "r", vp, Axis::kDiagonal, style);
      if (r < 0) render_error("negative circle radius");
      if (r == 0) return;
      sink.ellipse(length_attr(el, "cx", vp, Axis::kX, style), length_attr(el, "cy", vp, Axis::kY, style), r, r);
    } else if (tag == "ellipse") {
      double rx = length_attr(el, "rx", vp, Axis::kX, style);
      double ry = length_attr(el, "ry", vp, Axis::kY, style);
      if (rx < 0 || ry < 0) render_error("negative ellipse radius");
      if (rx == 0 || ry == 0) return;
      sink.ellipse(length_attr(el, "cx", vp, Axis::kX, style), length_attr(el, "cy", vp, Axis::kY, style), rx, ry);
    } else if (tag == "line") {
      sink.move_to({length_attr(el, "x1", vp, Axis::kX, style), length_attr(el, "y1", vp, Axis::kY, style)});
      sink.line_to({length_attr(el, "x2", vp, Axis::kX, style), length_attr(el, "y2", vp, Axis::kY, style)});
    } else if (tag == "polyline" || tag == "polygon") {
      const std::string* pts = el.attribute("points");
      if (!pts) return;
      auto nums = detail::parse_number_list(*pts);
      if (!nums || nums->size() % 2 != 0) render_error("malformed points list on <" + tag + ">");
      for (std::size_t i = 0; i < nums->size(); i += 2) {
        Point p{(*nums)[i], (*nums)[i + 1]};
        if (i == 0) sink.move_to(p);
        else sink.line_to(p);
      }
      if (tag == "polygon" && !nums->empty()) sink.close();
    } else if (tag == "path") {
      if (const auto* d = el.attribute("d")) append_path_data(sink, *d);
    }
    paint(sink.paths(), style, ctm);
  }

  void render_text(const SvgElement& el, const Style& style, const Affine& ctm, const Viewport& vp) {
    std::string content = el.text;
    for (const auto& child : el.children) {
      if (child.tag == "tspan" || child.tag == "textPath") content += child.text;
    }
    const double em = style.font_size;
    const double advance = 0.6 * em;
    const double x0 = first_coordinate(el, "x", vp, Axis::kX, style);
    const double y0 = first_coordinate(el, "y", vp, Axis::kY, style);
    std::string_view trimmed = detail::trim(content);
    double total = static_cast<double>(count_glyphs(trimmed)) * advance;
    double x = x0;
    if (style.text_anchor == "middle") x -= total / 2;
    else if (style.text_anchor == "end") x -= total;
    PathSink sink(ctm);
    for (std::size_t i = 0; i < trimmed.size(); ++i) {
      unsigned char c = static_cast<unsigned char>(trimmed[i]);
      if ((c & 0xC0) == 0x80) continue;
      if (!detail::is_space(trimmed[i])) {
        double gx = x + 0.05 * em, gy = y0 - 0.7 * em;
        sink.move_to({gx, gy});
        sink.line_to({gx + 0.5 * em, gy});
        sink.line_to({gx + 0.5 * em, y0});
        sink.line_to({gx, y0});
        sink.close();
      }
      x += advance;
    }
    paint(sink.paths(), style, ctm);
  }

  void render_use(const SvgElement& el, const Style& style, const Affine& ctm, const Viewport& vp, int depth) {
    const SvgElement* target = lookup_href(el);
    if (!target) render_error("<use> references a missing element");
    if (use_stack_.count(target) || use_stack_.size() >= kMaxUseDepth) render_error("cyclic <use> reference");
    use_stack_.insert(target);
    Affine m = ctm * Affine::translate(length_attr(el, "x", vp, Axis::kX, style),
                                       length_attr(el, "y", vp, Axis::kY, style));
    if (target->tag == "symbol" || target->tag == "svg") {
      double w = length_attr(el, "width", vp, Axis::kX, style,
                             length_attr(*target, "width", vp, Axis::kX, style, vp.width));
      double h = length_attr(el, "height", vp, Axis::kY, style,
                             length_attr(*target, "height", vp, Axis::kY, style, vp.height));
      if (w > 0 && h > 0) {
        Style s = style;
        apply_style(*target, s, vp);
        Viewport inner = vp;
        if (const auto* vbtext = target->attribute("viewBox")) {
          auto vb = parse_view_box(*vbtext);
          if (!vb) render_error("invalid viewBox on <" + target->tag + ">");
          m = m * fit_view_box(*vb, 0, 0, w, h, target->attribute("preserveAspectRatio"));
          inner = {vb->width, vb->height};
        }
        render_children(*target, s, m, inner, depth);
      }
    } else {
      render_element(*target, style, m, vp, depth + 1);
    }
    use_stack_.erase(target);
  }

  void render_element(const SvgElement& el, const Style& parent, const Affine& parent_ctm, const Viewport& vp,
                      int depth) {
    if (depth > kMaxTreeDepth) render_error("document nesting too deep");
    static const std::unordered_set<std::string> kContainers = {"g", "a", "switch"};
    static const std::unordered_set<std::string> kShapes = {"rect",     "circle",  "ellipse", "line",
                                                            "polyline", "polygon", "path"};
    const std::string& tag = el.tag;
    const bool drawable = kContainers.count(tag) || kShapes.count(tag) || tag == "svg" || tag == "use" ||
                          tag == "text";
    if (!drawable) return;
    if (hidden_by_display(el)) return;

    Style style = parent;
    apply_style(el, style, vp);
    Affine ctm = parent_ctm;
    if (const auto* t = el.attribute("transform")) ctm = ctm * transform_of(*t);

    if (tag == "svg") {
      double x = length_attr(el, "x", vp, Axis::kX, style);
      double y = length_attr(el, "y", vp, Axis::kY, style);
      double w = length_attr(el, "width", vp, Axis::kX, style, vp.width);
      double h = length_attr(el, "height", vp, Axis::kY, style, vp.height);
      if (w <= 0 || h <= 0) return;
      Viewport inner{w, h};
      Affine m = ctm * Affine::translate(x, y);
      if (const auto* vbtext = el.attribute("viewBox")) {
        auto vb = parse_view_box(*vbtext);
        if (!vb) render_error("invalid viewBox on nested <svg>");
        m = ctm * fit_view_box(*vb, x, y, w, h, el.attribute("preserveAspectRatio"));
        inner = {vb->width, vb->height};
      }
      render_children(el, style, m, inner, depth);
    } else if (tag == "switch") {
      if (!el.children.empty()) render_element(el.children.front(), style, ctm, vp, depth + 1);
    } else if (kContainers.count(tag)) {
      render_children(el, style, ctm, vp, depth);
    } else if (tag == "use") {
      render_use(el, style, ctm, vp, depth);
    } else if (tag == "text") {
      render_text(el, style, ctm, vp);
    } else {
      render_shape(el, style, ctm, vp);
    }
  }

  const SvgDocument& doc_;
  RasterImage image_;
  CoverageMask mask_;
  std::unordered_map<std::string, const SvgElement*> ids_;
  std::unordered_set<const SvgElement*> use_stack_;
};

}  // namespace

RasterImage render_raster(const SvgDocument& doc, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be positive");
  return SceneRenderer(doc, width, height).run();
}

bool is_empty_canvas(const RasterImage& image) {
  const auto& px = image.pixels();
  for (std::size_t i = 4; i < px.size(); i += 4) {
    if (px[i] != px[0] || px[i + 1] != px[1] || px[i + 2] != px[2] || px[i + 3] != px[3]) return false;
  }
  return true;
}

RenderVerdict check_renderable(std::string_view text, int raster_size) {
  RenderVerdict verdict;
  auto fail = [&](FailureStage stage, std::string detail) {
    verdict.renderable = false;
    verdict.failure_stage = stage;
    verdict.detail = std::move(detail);
    return verdict;
  };
  std::optional<SvgDocument> doc;
  try {
    doc = parse_svg(text);
  } catch (const Error& e) {
    return fail(e.code() == ErrorCode::kNonSvgRoot ? FailureStage::kNonSvgRoot : FailureStage::kParseError, e.what());
  }
  std::optional<RasterImage> raster;
  try {
    raster = render_raster(*doc, raster_size, raster_size);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw;
    return fail(FailureStage::kRenderError, e.what());
  } catch (const std::exception& e) {
    return fail(FailureStage::kRenderError, e.what());
  }
  if (is_empty_canvas(*raster)) return fail(FailureStage::kEmptyCanvas, "all pixels identical");
  verdict.renderable = true;
  verdict.raster = std::move(raster);
  return verdict;
}

}  // namespace svgr
