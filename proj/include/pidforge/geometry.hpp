#pragma once

#include <optional>
#include <vector>

#include "pidforge/types.hpp"

namespace pidforge::geometry {

/// Clipped boxes narrower or shorter than this are treated as empty.
inline constexpr double kMinClippedExtent = 2.0;

struct Segment {
  Point a;
  Point b;
};

enum class Side : std::uint8_t { kLeft, kRight, kTop, kBottom };

std::string_view to_string(Side s);

constexpr Side opposite(Side s) {
  switch (s) {
    case Side::kLeft: return Side::kRight;
    case Side::kRight: return Side::kLeft;
    case Side::kTop: return Side::kBottom;
    case Side::kBottom: return Side::kTop;
  }
  return s;
}

struct WindowCrossing {
  Point point;
  Side side;
  double t = 0.0;  // segment parameter in [0,1]
};

double intersection_area(const BBox& a, const BBox& b);
double iou(const BBox& a, const BBox& b);
double giou(const BBox& a, const BBox& b);
BBox hull(const BBox& a, const BBox& b);

/// Intersection of `b` with `window`, or nullopt when it is empty or thinner
/// than kMinClippedExtent in either axis.
std::optional<BBox> clip_box(const BBox& b, const BBox& window);

/// Half-open membership: x1 <= p.x < x2 and y1 <= p.y < y2.
bool contains(const BBox& window, Point p);

/// Boundary crossings of `s` with the closed rectangle `window`, ordered by
/// position along the segment. Segments wholly inside or wholly outside
/// produce nothing; a segment that passes through yields entry and exit.
std::vector<WindowCrossing> segment_window_exit(const Segment& s,
                                                const BBox& window);

/// Shortest distance from the box to any of the listed window sides.
double distance_to_sides(const BBox& b, const BBox& window,
                         const std::vector<Side>& sides);

}  // namespace pidforge::geometry
