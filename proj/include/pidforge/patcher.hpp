#pragma once

// Overlapping window tiling of a full plan. Cut pipes end in border nodes
// so the stitcher can weld the halves back together.

#include <filesystem>
#include <string>
#include <vector>

#include "pidforge/geometry.hpp"
#include "pidforge/image.hpp"
#include "pidforge/types.hpp"

namespace pidforge::patch {

struct PatchSpec {
  int size = 1500;
  int stride = 750;
  double border_box = 8.0;
  double margin = 100.0;  // attenuation margin handed to the stitcher
};

void check(const PatchSpec& spec);  // throws std::invalid_argument

struct Origin {
  int x0 = 0;
  int y0 = 0;
  friend bool operator==(const Origin&, const Origin&) = default;
};

/// Origins in row-major order. Per axis: multiples of the stride, with the
/// last one clamped to extent - size; a single origin 0 when extent <= size.
std::vector<Origin> plan_windows(int canvas_w, int canvas_h, const PatchSpec& spec);

struct BorderRecord {
  std::string node_id;
  geometry::Side side = geometry::Side::kLeft;
  double coord = 0.0;  // global position along the boundary line
  std::string edge_id;
};

struct Patch {
  Origin origin;
  BBox window;          // global coordinates
  Image image;          // empty when extracted without a raster
  ProcessGraph graph;   // stage patch, window-local coordinates
  std::vector<BorderRecord> borders;
};

/// Side of the window nearest to a border box centre (window-local
/// coordinates); ties resolve left, right, top, bottom.
geometry::Side border_side(const BBox& local_box, int size);

/// Global coordinate of the boundary line a border node sits on, and its
/// position along that line.
struct BorderLocation {
  geometry::Side side;
  double line = 0.0;
  double along = 0.0;
};
BorderLocation locate_border(const BBox& local_box, Origin origin, int size);

Patch extract_patch(const ProcessGraph& g, const Image* img, Origin origin, const PatchSpec& spec);

struct PatchSet {
  std::string plan;
  Canvas canvas;
  PatchSpec spec;
  std::vector<Patch> patches;
};

/// Extracts every window of plan_windows in parallel. `img` may be null.
PatchSet patch_plan(const ProcessGraph& g, const Image* img, const PatchSpec& spec,
                    const std::string& plan_name = "plan");

struct WindowEntry {
  Origin origin;
  std::string graphml;  // relative to the index file
  std::string png;      // empty when no raster was written
  friend bool operator==(const WindowEntry&, const WindowEntry&) = default;
};

struct WindowIndex {
  std::string plan;
  Canvas canvas;
  int patch_size = 1500;
  int stride = 750;
  std::vector<WindowEntry> windows;
  friend bool operator==(const WindowIndex&, const WindowIndex&) = default;
};

std::string windows_json(const WindowIndex& index);
WindowIndex parse_windows_json(const std::string& text);  // throws io::SchemaError

/// Writes `<dir>/<plan>/<x0>_<y0>.graphml|.png` and `<dir>/<plan>/windows.json`;
/// returns the index path.
std::filesystem::path write_patch_set(const PatchSet& set, const std::filesystem::path& dir);

struct LoadedPatches {
  WindowIndex index;
  std::vector<ProcessGraph> graphs;  // in index order
};

/// Loads the graphs listed in an index; patch files resolve against
/// `patch_dir` (defaults to the index's directory).
LoadedPatches read_patch_set(const std::filesystem::path& index_path,
                             const std::filesystem::path& patch_dir = {});

}  // namespace pidforge::patch
