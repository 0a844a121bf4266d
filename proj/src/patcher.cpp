#include "pidforge/patcher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "pidforge/annot_io.hpp"

namespace pidforge::patch {

using geometry::Side;

void check(const PatchSpec& spec) {
  if (spec.size <= 0) throw std::invalid_argument("patch size must be > 0");
  if (spec.stride <= 0 || spec.stride > spec.size) {
    throw std::invalid_argument("stride must satisfy 0 < stride <= patch size");
  }
  if (!(spec.border_box > 0.0) || spec.border_box > spec.size) {
    throw std::invalid_argument("border box must be in (0, patch size]");
  }
  if (!(spec.margin >= 0.0)) throw std::invalid_argument("margin must be >= 0");
}

namespace {

std::vector<int> axis_origins(int extent, int size, int stride) {
  std::vector<int> out;
  if (extent <= size) return {0};
  for (int o = 0;; o += stride) {
    if (o + size >= extent) {
      out.push_back(extent - size);
      break;
    }
    out.push_back(o);
  }
  return out;
}

bool inside_closed(const BBox& w, Point p) {
  return p.x >= w.x1 && p.x <= w.x2 && p.y >= w.y1 && p.y <= w.y2;
}

Side side_towards(const BBox& w, Point p, Point q) {
  // `p` lies on the boundary, `q` outside it.
  if (p.x == w.x1 && q.x < w.x1) return Side::kLeft;
  if (p.x == w.x2 && q.x > w.x2) return Side::kRight;
  if (p.y == w.y1 && q.y < w.y1) return Side::kTop;
  return Side::kBottom;
}

// First point where the polyline, which starts inside the window, leaves it.
std::optional<geometry::WindowCrossing> first_exit(const std::vector<Point>& path,
                                                   const BBox& w) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point a = path[i];
    const Point b = path[i + 1];
    const auto hits = geometry::segment_window_exit({a, b}, w);
    if (!hits.empty()) return hits.front();
    if (inside_closed(w, a) && !inside_closed(w, b)) {
      return geometry::WindowCrossing{a, side_towards(w, a, b), 0.0};
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<Origin> plan_windows(int canvas_w, int canvas_h, const PatchSpec& spec) {
  check(spec);
  const auto xs = axis_origins(canvas_w, spec.size, spec.stride);
  const auto ys = axis_origins(canvas_h, spec.size, spec.stride);
  std::vector<Origin> out;
  out.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) out.push_back({x, y});
  }
  return out;
}

Side border_side(const BBox& b, int size) {
  const Point c = b.center();
  const double d[4] = {c.x, size - c.x, c.y, size - c.y};
  const Side sides[4] = {Side::kLeft, Side::kRight, Side::kTop, Side::kBottom};
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (d[i] < d[best]) best = i;
  }
  return sides[best];
}

BorderLocation locate_border(const BBox& b, Origin o, int size) {
  const Side s = border_side(b, size);
  const Point c = b.center();
  switch (s) {
    case Side::kLeft: return {s, static_cast<double>(o.x0), o.y0 + c.y};
    case Side::kRight: return {s, static_cast<double>(o.x0 + size), o.y0 + c.y};
    case Side::kTop: return {s, static_cast<double>(o.y0), o.x0 + c.x};
    case Side::kBottom: return {s, static_cast<double>(o.y0 + size), o.x0 + c.x};
  }
  return {s, 0.0, 0.0};
}

Patch extract_patch(const ProcessGraph& g, const Image* img, Origin origin,
                    const PatchSpec& spec) {
  check(spec);
  if (g.stage != Stage::kCollapsed) {
    throw DataError("extract_patch expects a collapsed plan");
  }
  const double p = spec.size;
  Patch out;
  out.origin = origin;
  out.window = {static_cast<double>(origin.x0), static_cast<double>(origin.y0),
                origin.x0 + p, origin.y0 + p};
  if (img != nullptr) out.image = crop(*img, origin.x0, origin.y0, spec.size, spec.size);
  out.graph.stage = Stage::kPatch;
  out.graph.canvas = {spec.size, spec.size};

  const double dx = -origin.x0, dy = -origin.y0;
  std::unordered_map<std::string, bool> kept;
  for (const Node& n : g.nodes) {
    if (!geometry::contains(out.window, n.box.center())) continue;
    const auto clipped = geometry::clip_box(n.box, out.window);
    if (!clipped) continue;
    Node local = n;
    local.box = clipped->translated(dx, dy);
    out.graph.nodes.push_back(std::move(local));
    kept[n.id] = true;
  }

  const auto index = g.node_index();
  const double half = spec.border_box / 2.0;
  for (const Edge& e : g.edges) {
    const bool ks = kept.count(e.source) > 0;
    const bool kt = kept.count(e.target) > 0;
    if (ks && kt) {
      Edge local = e;
      local.route.clear();
      out.graph.edges.push_back(std::move(local));
      continue;
    }
    if (!ks && !kt) continue;
    const Node& in = g.nodes[index.at(ks ? e.source : e.target)];
    const Node& away = g.nodes[index.at(ks ? e.target : e.source)];
    std::vector<Point> path{in.box.center()};
    if (ks) {
      path.insert(path.end(), e.route.begin(), e.route.end());
    } else {
      path.insert(path.end(), e.route.rbegin(), e.route.rend());
    }
    path.push_back(away.box.center());

    Point at;
    Side side;
    if (const auto hit = first_exit(path, out.window)) {
      at = hit->point;
      side = hit->side;
    } else {
      const Point c = away.box.center();
      at = {std::clamp(c.x, out.window.x1, out.window.x2),
            std::clamp(c.y, out.window.y1, out.window.y2)};
      side = border_side(BBox{at.x - half, at.y - half, at.x + half, at.y + half}.translated(dx, dy),
                         spec.size);
    }
    const double lx = std::clamp(at.x + dx, half, p - half);
    const double ly = std::clamp(at.y + dy, half, p - half);
    Node border;
    border.id = "b:" + e.id;
    border.cls = NodeClass::kBorder;
    border.box = {lx - half, ly - half, lx + half, ly + half};
    border.confidence = in.confidence;
    const bool vertical = side == Side::kLeft || side == Side::kRight;
    out.borders.push_back({border.id, side, vertical ? ly - dy : lx - dx, e.id});
    Edge half_edge = e;
    half_edge.route.clear();
    (ks ? half_edge.target : half_edge.source) = border.id;
    out.graph.nodes.push_back(std::move(border));
    out.graph.edges.push_back(std::move(half_edge));
  }
  return out;
}

PatchSet patch_plan(const ProcessGraph& g, const Image* img, const PatchSpec& spec,
                    const std::string& plan_name) {
  PatchSet set;
  set.plan = plan_name;
  set.canvas = g.canvas;
  set.spec = spec;
  const auto origins = plan_windows(g.canvas.width, g.canvas.height, spec);
  set.patches.resize(origins.size());
  const auto n = static_cast<std::ptrdiff_t>(origins.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    set.patches[i] = extract_patch(g, img, origins[i], spec);
  }
  return set;
}

std::string windows_json(const WindowIndex& index) {
  nlohmann::ordered_json j;
  j["schema_version"] = io::kSchemaVersion;
  j["plan"] = index.plan;
  j["canvas"] = {{"width", index.canvas.width}, {"height", index.canvas.height}};
  j["patch_size"] = index.patch_size;
  j["stride"] = index.stride;
  j["windows"] = nlohmann::ordered_json::array();
  for (const auto& w : index.windows) {
    j["windows"].push_back(
        {{"x0", w.origin.x0}, {"y0", w.origin.y0}, {"graphml", w.graphml}, {"png", w.png}});
  }
  return j.dump(2) + "\n";
}

WindowIndex parse_windows_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema_version").get<int>() != io::kSchemaVersion) {
      throw io::SchemaError("window index: unsupported schema_version");
    }
    WindowIndex idx;
    idx.plan = j.at("plan").get<std::string>();
    idx.canvas = {j.at("canvas").at("width").get<int>(), j.at("canvas").at("height").get<int>()};
    idx.patch_size = j.at("patch_size").get<int>();
    idx.stride = j.at("stride").get<int>();
    for (const auto& w : j.at("windows")) {
      idx.windows.push_back({{w.at("x0").get<int>(), w.at("y0").get<int>()},
                             w.at("graphml").get<std::string>(),
                             w.value("png", std::string())});
    }
    return idx;
  } catch (const nlohmann::json::exception& ex) {
    throw io::SchemaError(std::string("window index: ") + ex.what());
  }
}

std::filesystem::path write_patch_set(const PatchSet& set, const std::filesystem::path& dir) {
  const auto plan_dir = dir / set.plan;
  std::filesystem::create_directories(plan_dir);
  WindowIndex idx{set.plan, set.canvas, set.spec.size, set.spec.stride, {}};
  for (const Patch& p : set.patches) {
    const std::string stem = std::to_string(p.origin.x0) + "_" + std::to_string(p.origin.y0);
    WindowEntry w{p.origin, stem + ".graphml", ""};
    io::write_graphml(p.graph, plan_dir / w.graphml);
    if (p.image.width > 0) {
      w.png = stem + ".png";
      write_png(p.image, plan_dir / w.png);
    }
    idx.windows.push_back(std::move(w));
  }
  const auto index_path = plan_dir / "windows.json";
  io::write_text(index_path, windows_json(idx));
  return index_path;
}

LoadedPatches read_patch_set(const std::filesystem::path& index_path,
                             const std::filesystem::path& patch_dir) {
  LoadedPatches out;
  out.index = parse_windows_json(io::read_text(index_path));
  const auto base = patch_dir.empty() ? index_path.parent_path() : patch_dir;
  for (const auto& w : out.index.windows) out.graphs.push_back(io::read_graphml(base / w.graphml));
  return out;
}

}  // namespace pidforge::patch
