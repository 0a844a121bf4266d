#pragma once

// Merges per-patch prediction graphs back into one full-plan graph.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pidforge/patcher.hpp"
#include "pidforge/types.hpp"

namespace pidforge::stitch {

struct StitchConfig {
  double margin = 100.0;  // attenuation ramp length, px
  double nms_iou = 0.9;
  double wbf_iou = 0.55;
  double epsilon = 20.0;  // border match tolerance along the boundary, px
  double floor = 0.05;    // minimum node confidence kept
};

void check(const StitchConfig& cfg);  // throws std::invalid_argument

/// Scales each non-border node confidence by min(1, distance / margin), the
/// distance being from the box to the nearest window side that lies inside
/// the canvas. Sides on the canvas edge do not crop symbols and are ignored.
/// `g` is in window-local coordinates.
ProcessGraph attenuate(const ProcessGraph& g, patch::Origin origin, int size,
                       const Canvas& canvas, double margin);

/// Node of a specific patch.
using SourceKey = std::pair<std::size_t, std::string>;

struct FusedNode {
  Node node;
  std::vector<SourceKey> members;
};

struct Fusion {
  std::vector<FusedNode> nodes;
  std::map<SourceKey, std::string> remap;  // every non-border source node
};

/// Per class: NMS sweep in (confidence desc, id asc, patch asc) order at
/// nms_iou, then greedy WBF clustering of the survivors at wbf_iou. Boxes an
/// NMS keeper suppresses join its cluster, so every detection contributes to
/// the fused box (confidence-weighted corner mean) and confidence (member
/// mean). `patches` must be in global coordinates.
Fusion fuse_nodes(const std::vector<ProcessGraph>& patches, const StitchConfig& cfg);

struct BorderHalf {
  std::size_t patch = 0;
  std::string border_id;
  std::string interior;  // fused id of the interior endpoint
  patch::BorderLocation where;
  EdgeClass cls = EdgeClass::kSolid;
  double confidence = 0.0;
};

/// Half-edges ending in border nodes, in (patch, border id) order. Border
/// nodes that do not have exactly one incident edge to an interior node are
/// skipped. `patches` are in window-local coordinates.
std::vector<BorderHalf> border_halves(const std::vector<ProcessGraph>& patches,
                                      const std::vector<patch::Origin>& origins, int size,
                                      const Fusion& fusion);

/// Welds halves on complementary sides of the same boundary line from
/// different patches, nearest first, within epsilon along the line. The
/// welded edge takes the class of the more confident half (ties: solid) and
/// the mean confidence. Unmatched halves are dropped.
std::vector<Edge> match_borders(const std::vector<BorderHalf>& halves, const StitchConfig& cfg);

/// Drops nodes below the floor, self-loops, duplicate edges (keeping the
/// most confident) and isolated nodes, then renumbers edges e0.. in
/// endpoint order.
ProcessGraph finalize(const ProcessGraph& g, const StitchConfig& cfg);

/// attenuate -> global coordinates -> fuse_nodes -> match_borders ->
/// finalize. Throws DataError when `patches` and `index` disagree.
ProcessGraph stitch(const std::vector<ProcessGraph>& patches, const patch::WindowIndex& index,
                    const StitchConfig& cfg);

}  // namespace pidforge::stitch
