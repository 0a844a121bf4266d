#pragma once

// Topology-preserving synthetic plan generation: perturb a seed layout,
// swap symbol templates, re-route pipes on a Manhattan grid and rasterise.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pidforge/annot_io.hpp"
#include "pidforge/dedup.hpp"
#include "pidforge/image.hpp"
#include "pidforge/types.hpp"

namespace pidforge::gen {

struct GenConfig {
  double delta = 60.0;      // max per-axis displacement, px
  int max_retries = 25;     // placement attempts per node
  int grid_cell = 10;       // routing grid resolution, px
  int margin = 100;         // keep-out band along the canvas edge, px
  std::uint8_t background = 230;
  std::uint64_t rng_seed = 0;
};

void check(const GenConfig& cfg);  // throws std::invalid_argument

using Rng = std::mt19937_64;

// --- symbol templates ------------------------------------------------------

/// Drawing primitive in the unit box [0,1]^2.
struct Primitive {
  enum class Kind : std::uint8_t { kPolyline, kEllipse };
  Kind kind = Kind::kPolyline;
  std::vector<Point> points;  // polyline vertices
  Point center{0.5, 0.5};     // ellipse
  Point radii{0.5, 0.5};
  bool closed = false;
  bool filled = false;
};

struct SymbolTemplate {
  std::string id;
  NodeClass cls = NodeClass::kGeneral;
  std::vector<Primitive> primitives;
  int width = 40;  // nominal size, px
  int height = 40;
};

class SymbolLibrary {
 public:
  SymbolLibrary() = default;
  explicit SymbolLibrary(std::vector<SymbolTemplate> templates);
  SymbolLibrary(const SymbolLibrary& o) : SymbolLibrary(o.templates_) {}
  SymbolLibrary& operator=(const SymbolLibrary&) = delete;

  /// Schematic library with at least two templates for every physical class.
  static const SymbolLibrary& builtin();

  const std::vector<const SymbolTemplate*>& of(NodeClass c) const;
  const SymbolTemplate* find(const std::string& id) const;
  const std::vector<SymbolTemplate>& all() const { return templates_; }

 private:
  std::vector<SymbolTemplate> templates_;
  std::map<NodeClass, std::vector<const SymbolTemplate*>> by_class_;
};

// --- generation steps ------------------------------------------------------

struct PerturbResult {
  ProcessGraph graph;
  int fallbacks = 0;  // nodes left in place after exhausting retries
};

/// Moves each node by a uniform offset in [-delta, delta]^2 (rounded to
/// whole pixels), re-drawing up to max_retries times while the moved box
/// overlaps another node or enters the margin band; otherwise the node
/// stays put. Adjacency is never touched.
PerturbResult perturb_layout(const ProcessGraph& seed, const GenConfig& cfg, Rng& rng);

/// Assigns each node a random template of its own class and resizes the box
/// to the template's nominal size about its centre (kept inside the
/// canvas). Throws std::invalid_argument naming a class with no template.
ProcessGraph substitute_symbols(const ProcessGraph& g, const SymbolLibrary& lib, Rng& rng);

/// Occupancy grid used by the router: node boxes inflated by one cell.
struct OccupancyGrid {
  int cell = 10;
  int cols = 0;
  int rows = 0;
  std::vector<std::uint8_t> blocked;

  bool inside(int cx, int cy) const { return cx >= 0 && cy >= 0 && cx < cols && cy < rows; }
  bool is_blocked(int cx, int cy) const {
    return blocked[static_cast<std::size_t>(cy) * cols + cx] != 0;
  }
  Point center_of(int cx, int cy) const {
    return {(cx + 0.5) * cell, (cy + 0.5) * cell};
  }
};

OccupancyGrid build_grid(const ProcessGraph& g, int cell);

/// Free grid cell adjacent to a box (just outside its inflation ring),
/// with the direction leading away from the box and the axis-parallel stub
/// joining the box boundary to the cell centre.
struct Terminal {
  int cx = 0;
  int cy = 0;
  int dir = 0;  // 0:+x 1:-x 2:+y 3:-y, pointing away from the box
  Point on_box;
};

std::vector<Terminal> terminals(const BBox& box, const OccupancyGrid& grid);

struct Route {
  std::vector<Point> polyline;
  bool fallback = false;  // L-shaped route that may cross obstacles
  int steps = 0;          // grid moves between the two terminals
  int bends = 0;
};

/// Obstacle-avoiding rectilinear route between two boxes: least-cost path
/// with unit steps and a bend penalty of 2, or an L-shaped fallback.
Route route_between(const BBox& from, const BBox& to, const OccupancyGrid& grid);

/// Routes every edge; fills Edge::route and returns per-edge details in
/// edge order.
std::vector<Route> route_edges(ProcessGraph& g, const GenConfig& cfg);

struct RenderedPlan {
  Image image;
  ProcessGraph graph;  // collapsed stage, routes and templates filled in
  std::vector<Route> routes;
};

/// Deterministic rasterisation: background, 3 px pipes (non_solid dashed
/// 12 on / 8 off), then each symbol inside a white node box.
Image render(const ProcessGraph& g, const SymbolLibrary& lib, const GenConfig& cfg);

/// One full attempt: perturb, substitute, route, render.
RenderedPlan generate_plan(const ProcessGraph& seed, const SymbolLibrary& lib,
                           const GenConfig& cfg, Rng& rng);

// --- corpus ----------------------------------------------------------------

struct NamedGraph {
  std::string name;
  ProcessGraph graph;
};

struct CorpusOptions {
  int target = 50;
  int attempts_cap = 1000;
  std::filesystem::path out_dir;  // empty: keep results in memory only
  int batch = 8;                  // attempts evaluated concurrently
  std::int64_t first_attempt = 0;  // attempt numbering offset when resuming
  std::function<std::string()> clock;  // acceptance timestamp source
};

struct CorpusReport {
  std::vector<io::ManifestEntry> manifest;
  std::vector<RenderedPlan> plans;  // only when out_dir is empty
  int attempts = 0;
  int rejected_structural = 0;
  int rejected_visual = 0;
  bool ok = false;
  std::string message;

  double acceptance_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(manifest.size()) / attempts;
  }
};

/// Round-robin over seeds until `target` plans are accepted or the attempt
/// cap is reached. Attempt i uses seed i mod |seeds| and an RNG derived from
/// (cfg.rng_seed, i); acceptance runs in attempt order, so results do not
/// depend on the batch size or thread count.
CorpusReport generate_corpus(const std::vector<NamedGraph>& seeds, const GenConfig& cfg,
                             dedup::Registry& registry, const CorpusOptions& opts,
                             const SymbolLibrary& lib = SymbolLibrary::builtin());

std::string utc_now();

}  // namespace pidforge::gen
