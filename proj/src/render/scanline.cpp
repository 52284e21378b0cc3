#include "scanline.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace svgr::detail {

namespace {

struct Edge {
  double x0, y0, x1, y1;  // y0 < y1
  int dir;
};

struct Crossing {
  double x;
  int dir;
};

double signed_area(const std::vector<Point>& pts) {
  double a = 0.0;
  for (std::size_t i = 0, n = pts.size(); i < n; ++i) {
    const Point& p = pts[i];
    const Point& q = pts[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

Polyline oriented(std::vector<Point> pts) {
  if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
  return Polyline{std::move(pts), true};
}

Polyline disc(Point c, double r) {
  int n = std::clamp(static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / 0.75)), 8, 128);
  std::vector<Point> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * std::numbers::pi * i / n;
    pts.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return oriented(std::move(pts));
}

}  // namespace

void fill_polylines(const std::vector<Polyline>& paths, FillRule rule, CoverageMask& mask) {
  constexpr int kSub = CoverageMask::kSubsamples;
  std::vector<Edge> edges;
  for (const auto& path : paths) {
    const auto& pts = path.points;
    for (std::size_t i = 0, n = pts.size(); n >= 2 && i < n; ++i) {
      Point p = pts[i];
      Point q = pts[(i + 1) % n];
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(q.x) || !std::isfinite(q.y)) continue;
      if (p.y == q.y) continue;
      if (p.y < q.y) edges.push_back({p.x, p.y, q.x, q.y, 1});
      else edges.push_back({q.x, q.y, p.x, p.y, -1});
    }
  }
  if (edges.empty()) return;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.y0 < b.y0; });

  const int rows = mask.height() * kSub;
  const int cols = mask.width() * kSub;
  std::vector<const Edge*> active;
  std::vector<Crossing> crossings;
  std::size_t next = 0;
  for (int sy = 0; sy < rows; ++sy) {
    const double y = (sy + 0.5) / kSub;
    while (next < edges.size() && edges[next].y0 <= y) active.push_back(&edges[next++]);
    std::erase_if(active, [y](const Edge* e) { return e->y1 <= y; });
    if (active.empty()) continue;
    crossings.clear();
    for (const Edge* e : active) {
      if (e->y0 > y) continue;
      double t = (y - e->y0) / (e->y1 - e->y0);
      crossings.push_back({e->x0 + t * (e->x1 - e->x0), e->dir});
    }
    std::sort(crossings.begin(), crossings.end(), [](const Crossing& a, const Crossing& b) { return a.x < b.x; });
    int winding = 0;
    for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
      winding += rule == FillRule::kNonZero ? crossings[i].dir : 1;
      bool inside = rule == FillRule::kNonZero ? winding != 0 : (winding & 1) != 0;
      if (!inside) continue;
      // Sample centers at (j + 0.5) / kSub in [xa, xb).
      double xa = crossings[i].x * kSub - 0.5;
      double xb = crossings[i + 1].x * kSub - 0.5;
      int j0 = static_cast<int>(std::max(0.0, std::ceil(xa)));
      int j1 = static_cast<int>(std::min(static_cast<double>(cols), std::ceil(xb)));
      for (int j = j0; j < j1; ++j) mask.add(j / kSub, sy / kSub);
    }
  }
}

std::vector<Polyline> stroke_outline(const std::vector<Polyline>& paths, double width, LineCap cap) {
  std::vector<Polyline> out;
  if (!(width > 0.0)) return out;
  const double hw = width / 2.0;
  for (const auto& path : paths) {
    std::vector<Point> pts;
    for (const Point& p : path.points) {
      if (pts.empty() || p.x != pts.back().x || p.y != pts.back().y) pts.push_back(p);
    }
    if (path.closed && pts.size() > 1 && pts.front().x == pts.back().x && pts.front().y == pts.back().y) {
      pts.pop_back();
    }
    if (pts.size() == 1) {
      if (cap == LineCap::kRound) {
        out.push_back(disc(pts[0], hw));
      } else if (cap == LineCap::kSquare) {
        Point c = pts[0];
        out.push_back(oriented({{c.x - hw, c.y - hw}, {c.x + hw, c.y - hw}, {c.x + hw, c.y + hw}, {c.x - hw, c.y + hw}}));
      }
      continue;
    }
    if (pts.empty()) continue;
    const bool closed = path.closed && pts.size() > 2;
    const std::size_t segs = closed ? pts.size() : pts.size() - 1;
    for (std::size_t i = 0; i < segs; ++i) {
      Point p = pts[i];
      Point q = pts[(i + 1) % pts.size()];
      double dx = q.x - p.x, dy = q.y - p.y;
      double len = std::hypot(dx, dy);
      double ux = dx / len, uy = dy / len;
      if (!closed && cap == LineCap::kSquare) {
        if (i == 0) p = {p.x - ux * hw, p.y - uy * hw};
        if (i + 1 == segs) q = {q.x + ux * hw, q.y + uy * hw};
      }
      double nx = -uy * hw, ny = ux * hw;
      out.push_back(oriented({{p.x + nx, p.y + ny}, {q.x + nx, q.y + ny}, {q.x - nx, q.y - ny}, {p.x - nx, p.y - ny}}));
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      bool endpoint = !closed && (i == 0 || i + 1 == pts.size());
      if (!endpoint || cap == LineCap::kRound) out.push_back(disc(pts[i], hw));
    }
  }
  return out;
}

void composite(const CoverageMask& mask, const Color& color, double opacity, std::vector<std::uint8_t>& rgba) {
  const double base_alpha = std::clamp(color.a * opacity, 0.0, 1.0);
  if (base_alpha <= 0.0) return;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      int cov = mask.at(x, y);
      if (cov == 0) continue;
      double sa = base_alpha * cov / CoverageMask::kMaxCoverage;
      std::uint8_t* px = &rgba[(static_cast<std::size_t>(y) * mask.width() + x) * 4];
      double da = px[3] / 255.0;
      double oa = sa + da * (1.0 - sa);
      auto blend = [&](double src, std::uint8_t dst) {
        double v = (src * sa + (dst / 255.0) * da * (1.0 - sa)) / oa;
        return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
      };
      px[0] = blend(color.r, px[0]);
      px[1] = blend(color.g, px[1]);
      px[2] = blend(color.b, px[2]);
      px[3] = static_cast<std::uint8_t>(std::lround(oa * 255.0));
    }
  }
}

}  // namespace svgr::detail
