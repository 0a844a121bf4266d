#include <stdexcept>

#include "pidforge/generator.hpp"

namespace pidforge::gen {
namespace {

Primitive poly(std::vector<Point> pts, bool closed = false, bool filled = false) {
  Primitive p;
  p.kind = Primitive::Kind::kPolyline;
  p.points = std::move(pts);
  p.closed = closed;
  p.filled = filled;
  return p;
}

Primitive ellipse(Point c, Point r, bool filled = false) {
  Primitive p;
  p.kind = Primitive::Kind::kEllipse;
  p.center = c;
  p.radii = r;
  p.filled = filled;
  return p;
}

Primitive rect(double x1, double y1, double x2, double y2) {
  return poly({{x1, y1}, {x2, y1}, {x2, y2}, {x1, y2}}, true);
}

std::vector<SymbolTemplate> builtin_templates() {
  using K = NodeClass;
  std::vector<SymbolTemplate> t;
  // Valves: bowtie variants.
  t.push_back({"valve/bowtie", K::kValve,
               {poly({{0, 0.1}, {1, 0.9}, {1, 0.1}, {0, 0.9}}, true)}, 40, 28});
  t.push_back({"valve/bowtie_stem", K::kValve,
               {poly({{0, 0.35}, {1, 0.95}, {1, 0.35}, {0, 0.95}}, true),
                poly({{0.5, 0.65}, {0.5, 0.1}}), poly({{0.3, 0.1}, {0.7, 0.1}})},
               40, 40});
  t.push_back({"valve/bowtie_filled", K::kValve,
               {poly({{0, 0.1}, {0.5, 0.5}, {0, 0.9}}, true, true),
                poly({{1, 0.1}, {0.5, 0.5}, {1, 0.9}}, true)},
               36, 28});
  // Pumps: circle with chord, circle with inner triangle.
  t.push_back({"pump/circle_chord", K::kPump,
               {ellipse({0.5, 0.5}, {0.48, 0.48}), poly({{0.5, 0.02}, {0.98, 0.5}})},
               48, 48});
  t.push_back({"pump/circle_triangle", K::kPump,
               {ellipse({0.5, 0.5}, {0.48, 0.48}),
                poly({{0.3, 0.25}, {0.8, 0.5}, {0.3, 0.75}}, true)},
               52, 52});
  // Instrumentation: bubble, bubble in square, bubble with midline.
  t.push_back({"instrumentation/circle", K::kInstrumentation,
               {ellipse({0.5, 0.5}, {0.48, 0.48})}, 36, 36});
  t.push_back({"instrumentation/circle_in_square", K::kInstrumentation,
               {rect(0.02, 0.02, 0.98, 0.98), ellipse({0.5, 0.5}, {0.46, 0.46})}, 40, 40});
  t.push_back({"instrumentation/circle_midline", K::kInstrumentation,
               {ellipse({0.5, 0.5}, {0.48, 0.48}), poly({{0.02, 0.5}, {0.98, 0.5}})},
               36, 36});
  // General equipment: rectangle variants.
  t.push_back({"general/rect", K::kGeneral, {rect(0.02, 0.02, 0.98, 0.98)}, 60, 40});
  t.push_back({"general/rect_diagonal", K::kGeneral,
               {rect(0.02, 0.02, 0.98, 0.98), poly({{0.02, 0.98}, {0.98, 0.02}})}, 56, 44});
  t.push_back({"general/rect_double", K::kGeneral,
               {rect(0.02, 0.02, 0.98, 0.98), rect(0.2, 0.2, 0.8, 0.8)}, 64, 40});
  // Tanks: capsules.
  t.push_back({"tank/capsule_vertical", K::kTank,
               {ellipse({0.5, 0.15}, {0.48, 0.13}), ellipse({0.5, 0.85}, {0.48, 0.13}),
                poly({{0.02, 0.15}, {0.02, 0.85}}), poly({{0.98, 0.15}, {0.98, 0.85}})},
               70, 110});
  t.push_back({"tank/capsule_horizontal", K::kTank,
               {ellipse({0.15, 0.5}, {0.13, 0.48}), ellipse({0.85, 0.5}, {0.13, 0.48}),
                poly({{0.15, 0.02}, {0.85, 0.02}}), poly({{0.15, 0.98}, {0.85, 0.98}})},
               110, 64});
  // Arrows: solid triangles.
  t.push_back({"arrow/triangle", K::kArrow,
               {poly({{0.05, 0.05}, {0.95, 0.5}, {0.05, 0.95}}, true, true)}, 24, 20});
  t.push_back({"arrow/triangle_tail", K::kArrow,
               {poly({{0.4, 0.05}, {0.98, 0.5}, {0.4, 0.95}}, true, true),
                poly({{0.02, 0.5}, {0.4, 0.5}})},
               32, 20});
  // Inlet/outlet: home-plate pentagons.
  t.push_back({"inlet_outlet/pentagon_right", K::kInletOutlet,
               {poly({{0.02, 0.05}, {0.7, 0.05}, {0.98, 0.5}, {0.7, 0.95}, {0.02, 0.95}}, true)},
               60, 28});
  t.push_back({"inlet_outlet/pentagon_left", K::kInletOutlet,
               {poly({{0.98, 0.05}, {0.3, 0.05}, {0.02, 0.5}, {0.3, 0.95}, {0.98, 0.95}}, true)},
               60, 28});
  return t;
}

}  // namespace

SymbolLibrary::SymbolLibrary(std::vector<SymbolTemplate> templates)
    : templates_(std::move(templates)) {
  for (const auto& t : templates_) by_class_[t.cls].push_back(&t);
}

const SymbolLibrary& SymbolLibrary::builtin() {
  static const SymbolLibrary lib(builtin_templates());
  return lib;
}

const std::vector<const SymbolTemplate*>& SymbolLibrary::of(NodeClass c) const {
  static const std::vector<const SymbolTemplate*> none;
  auto it = by_class_.find(c);
  return it == by_class_.end() ? none : it->second;
}

const SymbolTemplate* SymbolLibrary::find(const std::string& id) const {
  for (const auto& t : templates_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

}  // namespace pidforge::gen
