#include "pidforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pidforge::geometry {

std::string_view to_string(Side s) {
  switch (s) {
    case Side::kLeft: return "left";
    case Side::kRight: return "right";
    case Side::kTop: return "top";
    case Side::kBottom: return "bottom";
  }
  return "?";
}

double intersection_area(const BBox& a, const BBox& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

BBox hull(const BBox& a, const BBox& b) {
  return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
          std::max(a.y2, b.y2)};
}

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double giou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  const double c = hull(a, b).area();
  if (uni <= 0.0 || c <= 0.0) return 0.0;
  return inter / uni - (c - uni) / c;
}

std::optional<BBox> clip_box(const BBox& b, const BBox& window) {
  BBox r{std::max(b.x1, window.x1), std::max(b.y1, window.y1),
         std::min(b.x2, window.x2), std::min(b.y2, window.y2)};
  if (r.width() < kMinClippedExtent || r.height() < kMinClippedExtent) {
    return std::nullopt;
  }
  return r;
}

bool contains(const BBox& window, Point p) {
  return p.x >= window.x1 && p.x < window.x2 && p.y >= window.y1 &&
         p.y < window.y2;
}

std::vector<WindowCrossing> segment_window_exit(const Segment& s,
                                                const BBox& window) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  if (dx == 0.0 && dy == 0.0) return {};

  // Liang-Barsky against the closed rectangle.
  double t0 = 0.0;
  double t1 = 1.0;
  Side enter_side = Side::kLeft;
  Side exit_side = Side::kRight;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {s.a.x - window.x1, window.x2 - s.a.x,
                       s.a.y - window.y1, window.y2 - s.a.y};
  const Side sides[4] = {Side::kLeft, Side::kRight, Side::kTop, Side::kBottom};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return {};
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      if (r > t0) {
        t0 = r;
        enter_side = sides[i];
      }
    } else if (r < t1) {
      t1 = r;
      exit_side = sides[i];
    }
  }
  if (t0 >= t1) return {};

  auto at = [&](double t, Side side) {
    Point pt{s.a.x + t * dx, s.a.y + t * dy};
    // Snap the coordinate that lies on the boundary line exactly.
    switch (side) {
      case Side::kLeft: pt.x = window.x1; break;
      case Side::kRight: pt.x = window.x2; break;
      case Side::kTop: pt.y = window.y1; break;
      case Side::kBottom: pt.y = window.y2; break;
    }
    return WindowCrossing{pt, side, t};
  };

  std::vector<WindowCrossing> out;
  if (t0 > 0.0) out.push_back(at(t0, enter_side));
  if (t1 < 1.0) out.push_back(at(t1, exit_side));
  return out;
}

double distance_to_sides(const BBox& b, const BBox& window,
                         const std::vector<Side>& sides) {
  double best = std::numeric_limits<double>::infinity();
  for (Side s : sides) {
    double d = 0.0;
    switch (s) {
      case Side::kLeft: d = b.x1 - window.x1; break;
      case Side::kRight: d = window.x2 - b.x2; break;
      case Side::kTop: d = b.y1 - window.y1; break;
      case Side::kBottom: d = window.y2 - b.y2; break;
    }
    best = std::min(best, std::max(0.0, d));
  }
  return best;
}

}  // namespace pidforge::geometry
