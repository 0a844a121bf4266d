#include <algorithm>
#include <cmath>
#include <numbers>

#include "pidforge/generator.hpp"

namespace pidforge::gen {
namespace {

constexpr std::uint8_t kInk = 20;
constexpr std::uint8_t kPaper = 255;
constexpr double kPipeWidth = 3.0;
constexpr double kSymbolWidth = 2.0;
constexpr double kDashOn = 12.0;
constexpr double kDashPeriod = 20.0;  // 12 on + 8 off
constexpr double kStep = 0.25;

// Paints pixels whose centres fall in the half-open square of side `w`
// around (x, y).
void stamp(Image& img, double x, double y, double w, std::uint8_t ink) {
  const double h = w / 2.0;
  const int px1 = static_cast<int>(std::ceil(x - h - 0.5));
  const int px2 = static_cast<int>(std::ceil(x + h - 0.5)) - 1;
  const int py1 = static_cast<int>(std::ceil(y - h - 0.5));
  const int py2 = static_cast<int>(std::ceil(y + h - 0.5)) - 1;
  for (int py = std::max(py1, 0); py <= std::min(py2, img.height - 1); ++py) {
    for (int px = std::max(px1, 0); px <= std::min(px2, img.width - 1); ++px) {
      img.at(px, py) = ink;
    }
  }
}

// Strokes a polyline; with `dashed`, only arc-length intervals
// [k*20, k*20+12) are inked.
void stroke(Image& img, const std::vector<Point>& pts, double w, bool dashed,
            std::uint8_t ink) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point a = pts[i];
    const Point b = pts[i + 1];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int n = std::max(1, static_cast<int>(std::ceil(len / kStep)));
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      const double at = s + t * len;
      if (dashed && std::fmod(at, kDashPeriod) >= kDashOn) continue;
      stamp(img, a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), w, ink);
    }
    s += len;
  }
}

void fill_polygon(Image& img, const std::vector<Point>& poly, std::uint8_t ink) {
  if (poly.size() < 3) return;
  double ymin = poly[0].y, ymax = poly[0].y;
  for (const Point& p : poly) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  std::vector<double> xs;
  for (int py = std::max(0, static_cast<int>(std::floor(ymin)));
       py <= std::min(img.height - 1, static_cast<int>(std::ceil(ymax))); ++py) {
    const double y = py + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point a = poly[i];
      const Point b = poly[(i + 1) % poly.size()];
      if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y)) {
        xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int px1 = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
      const int px2 = std::min(img.width - 1, static_cast<int>(std::ceil(xs[i + 1] - 0.5)) - 1);
      for (int px = px1; px <= px2; ++px) img.at(px, py) = ink;
    }
  }
}

void draw_symbol(Image& img, const SymbolTemplate& t, const BBox& box) {
  // Inset so strokes stay inside the box.
  const double inset = kSymbolWidth / 2.0;
  const double x0 = box.x1 + inset, y0 = box.y1 + inset;
  const double w = box.width() - 2 * inset, h = box.height() - 2 * inset;
  auto map = [&](Point u) { return Point{x0 + u.x * w, y0 + u.y * h}; };
  for (const Primitive& p : t.primitives) {
    std::vector<Point> pts;
    if (p.kind == Primitive::Kind::kEllipse) {
      const double rx = p.radii.x * w, ry = p.radii.y * h;
      const int n = std::max(16, static_cast<int>(std::ceil(2 * std::numbers::pi *
                                                            std::max(rx, ry) / 2.0)));
      const Point c = map(p.center);
      for (int k = 0; k <= n; ++k) {
        const double a = 2 * std::numbers::pi * k / n;
        pts.push_back({c.x + rx * std::cos(a), c.y + ry * std::sin(a)});
      }
    } else {
      for (const Point& u : p.points) pts.push_back(map(u));
      if (p.closed && !pts.empty()) pts.push_back(pts.front());
    }
    if (p.filled) fill_polygon(img, pts, kInk);
    stroke(img, pts, kSymbolWidth, false, kInk);
  }
}

}  // namespace

Image render(const ProcessGraph& g, const SymbolLibrary& lib, const GenConfig& cfg) {
  Image img(g.canvas.width, g.canvas.height, cfg.background);
  for (const Edge& e : g.edges) {
    stroke(img, e.route, kPipeWidth, e.cls == EdgeClass::kNonSolid, kInk);
  }
  for (const Node& n : g.nodes) {
    const int x1 = std::max(0, static_cast<int>(std::floor(n.box.x1)));
    const int y1 = std::max(0, static_cast<int>(std::floor(n.box.y1)));
    const int x2 = std::min(img.width, static_cast<int>(std::ceil(n.box.x2)));
    const int y2 = std::min(img.height, static_cast<int>(std::ceil(n.box.y2)));
    for (int y = y1; y < y2; ++y) {
      for (int x = x1; x < x2; ++x) img.at(x, y) = kPaper;
    }
    const SymbolTemplate* t = lib.find(n.template_id);
    if (t == nullptr) {
      const auto& choices = lib.of(n.cls);
      if (choices.empty()) continue;
      t = choices.front();
    }
    draw_symbol(img, *t, n.box);
  }
  return img;
}

}  // namespace pidforge::gen
