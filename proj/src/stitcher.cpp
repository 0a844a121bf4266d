#include "pidforge/stitcher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "pidforge/geometry.hpp"

namespace pidforge::stitch {

using geometry::Side;

void check(const StitchConfig& cfg) {
  auto unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!unit(cfg.nms_iou) || !unit(cfg.wbf_iou)) {
    throw std::invalid_argument("IoU thresholds must lie in (0, 1]");
  }
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(cfg.margin >= 0.0)) throw std::invalid_argument("margin must be >= 0");
  if (!(cfg.floor >= 0.0 && cfg.floor <= 1.0)) {
    throw std::invalid_argument("confidence floor must lie in [0, 1]");
  }
}

ProcessGraph attenuate(const ProcessGraph& g, patch::Origin origin, int size,
                       const Canvas& canvas, double margin) {
  std::vector<Side> sides;
  if (origin.x0 > 0) sides.push_back(Side::kLeft);
  if (origin.x0 + size < canvas.width) sides.push_back(Side::kRight);
  if (origin.y0 > 0) sides.push_back(Side::kTop);
  if (origin.y0 + size < canvas.height) sides.push_back(Side::kBottom);
  ProcessGraph out = g;
  if (sides.empty()) return out;
  const BBox window{0.0, 0.0, static_cast<double>(size), static_cast<double>(size)};
  for (Node& n : out.nodes) {
    if (n.cls == NodeClass::kBorder) continue;
    const double d = geometry::distance_to_sides(n.box, window, sides);
    const double f = margin <= 0.0 ? 1.0 : std::min(1.0, d / margin);
    n.confidence *= f;
  }
  return out;
}

namespace {

struct Detection {
  std::size_t patch;
  const Node* node;
};

bool ranks_before(const Detection& a, const Detection& b) {
  if (a.node->confidence != b.node->confidence) return a.node->confidence > b.node->confidence;
  if (a.node->id != b.node->id) return a.node->id < b.node->id;
  return a.patch < b.patch;
}

BBox weighted_box(const std::vector<Detection>& members) {
  double wsum = 0.0;
  for (const auto& m : members) wsum += m.node->confidence;
  const bool uniform = !(wsum > 0.0);
  BBox b{0, 0, 0, 0};
  for (const auto& m : members) {
    const double w = uniform ? 1.0 / members.size() : m.node->confidence / wsum;
    b.x1 += w * m.node->box.x1;
    b.y1 += w * m.node->box.y1;
    b.x2 += w * m.node->box.x2;
    b.y2 += w * m.node->box.y2;
  }
  return b;
}

// Index of the candidate with the highest IoU >= threshold; ties keep the
// earliest. -1 when none qualifies.
template <typename BoxOf>
int best_overlap(const BBox& box, std::size_t count, BoxOf box_of, double threshold) {
  int best = -1;
  double best_iou = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = geometry::iou(box, box_of(i));
    if (v >= threshold && (best < 0 || v > best_iou)) {
      best = static_cast<int>(i);
      best_iou = v;
    }
  }
  return best;
}

}  // namespace

Fusion fuse_nodes(const std::vector<ProcessGraph>& patches, const StitchConfig& cfg) {
  std::map<NodeClass, std::vector<Detection>> by_class;
  for (std::size_t p = 0; p < patches.size(); ++p) {
    for (const Node& n : patches[p].nodes) {
      if (n.cls != NodeClass::kBorder) by_class[n.cls].push_back({p, &n});
    }
  }

  Fusion out;
  std::unordered_set<std::string> used;
  for (auto& [cls, dets] : by_class) {
    std::sort(dets.begin(), dets.end(), ranks_before);

    // NMS: each keeper owns the detections it suppresses.
    std::vector<std::vector<Detection>> keepers;
    for (const Detection& d : dets) {
      const int k = best_overlap(
          d.node->box, keepers.size(), [&](std::size_t i) { return keepers[i].front().node->box; },
          cfg.nms_iou);
      if (k >= 0) {
        keepers[k].push_back(d);
      } else {
        keepers.push_back({d});
      }
    }

    // WBF over the keepers, compared against each cluster's current fused box.
    std::vector<std::vector<Detection>> clusters;
    std::vector<BBox> fused;
    for (auto& group : keepers) {
      const int c = best_overlap(
          group.front().node->box, clusters.size(), [&](std::size_t i) { return fused[i]; },
          cfg.wbf_iou);
      if (c >= 0) {
        clusters[c].insert(clusters[c].end(), group.begin(), group.end());
        fused[c] = weighted_box(clusters[c]);
      } else {
        clusters.push_back(std::move(group));
        fused.push_back(weighted_box(clusters.back()));
      }
    }

    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const auto& members = clusters[c];
      FusedNode f;
      f.node = *members.front().node;
      f.node.box = fused[c];
      double csum = 0.0;
      for (const auto& m : members) csum += m.node->confidence;
      f.node.confidence = csum / members.size();
      std::string id = f.node.id;
      for (int k = 1; used.count(id) > 0; ++k) id = f.node.id + "#" + std::to_string(k);
      used.insert(id);
      f.node.id = id;
      for (const auto& m : members) {
        f.members.emplace_back(m.patch, m.node->id);
        out.remap[{m.patch, m.node->id}] = id;
      }
      out.nodes.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<BorderHalf> border_halves(const std::vector<ProcessGraph>& patches,
                                      const std::vector<patch::Origin>& origins, int size,
                                      const Fusion& fusion) {
  std::vector<BorderHalf> out;
  for (std::size_t p = 0; p < patches.size(); ++p) {
    const ProcessGraph& g = patches[p];
    std::unordered_map<std::string, std::vector<const Edge*>> incident;
    for (const Edge& e : g.edges) {
      incident[e.source].push_back(&e);
      if (e.target != e.source) incident[e.target].push_back(&e);
    }
    std::vector<const Node*> borders;
    for (const Node& n : g.nodes) {
      if (n.cls == NodeClass::kBorder) borders.push_back(&n);
    }
    std::sort(borders.begin(), borders.end(),
              [](const Node* a, const Node* b) { return a->id < b->id; });
    for (const Node* b : borders) {
      const auto it = incident.find(b->id);
      if (it == incident.end() || it->second.size() != 1) continue;
      const Edge& e = *it->second.front();
      const std::string& other = e.source == b->id ? e.target : e.source;
      const auto mapped = fusion.remap.find({p, other});
      if (mapped == fusion.remap.end()) continue;
      out.push_back({p, b->id, mapped->second, patch::locate_border(b->box, origins[p], size),
                     e.cls, e.confidence});
    }
  }
  return out;
}

std::vector<Edge> match_borders(const std::vector<BorderHalf>& halves, const StitchConfig& cfg) {
  // Candidates grouped by boundary line; the vertical flag separates x- from
  // y-lines with equal coordinates.
  std::map<std::pair<bool, double>, std::vector<std::size_t>> lines;
  for (std::size_t i = 0; i < halves.size(); ++i) {
    const Side s = halves[i].where.side;
    lines[{s == Side::kLeft || s == Side::kRight, halves[i].where.line}].push_back(i);
  }
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (const auto& [line, members] : lines) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const BorderHalf& h1 = halves[members[a]];
        const BorderHalf& h2 = halves[members[b]];
        if (h1.patch == h2.patch || h1.where.side != geometry::opposite(h2.where.side)) continue;
        const double d = std::abs(h1.where.along - h2.where.along);
        if (d <= cfg.epsilon) cand.emplace_back(d, members[a], members[b]);
      }
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> taken(halves.size(), false);
  std::vector<Edge> out;
  for (const auto& [d, i, j] : cand) {
    if (taken[i] || taken[j]) continue;
    taken[i] = taken[j] = true;
    const BorderHalf& a = halves[i];
    const BorderHalf& b = halves[j];
    Edge e;
    e.id = "w" + std::to_string(out.size());
    e.source = a.interior;
    e.target = b.interior;
    if (a.confidence != b.confidence) {
      e.cls = a.confidence > b.confidence ? a.cls : b.cls;
    } else {
      e.cls = a.cls == b.cls ? a.cls : EdgeClass::kSolid;
    }
    e.confidence = (a.confidence + b.confidence) / 2.0;
    out.push_back(std::move(e));
  }
  return out;
}

ProcessGraph finalize(const ProcessGraph& g, const StitchConfig& cfg) {
  ProcessGraph out;
  out.canvas = g.canvas;
  out.stage = Stage::kStitched;
  std::unordered_set<std::string> alive;
  for (const Node& n : g.nodes) {
    if (n.cls == NodeClass::kBorder || n.confidence < cfg.floor) continue;
    alive.insert(n.id);
  }

  std::map<std::pair<std::string, std::string>, Edge> merged;
  for (const Edge& e : g.edges) {
    if (e.source == e.target || !alive.count(e.source) || !alive.count(e.target)) continue;
    const auto key = edge_key(e.source, e.target);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, e);
      continue;
    }
    Edge& cur = it->second;
    if (e.confidence > cur.confidence) {
      cur.confidence = e.confidence;
      cur.cls = e.cls;
    } else if (e.confidence == cur.confidence && e.cls != cur.cls) {
      cur.cls = EdgeClass::kSolid;
    }
  }

  std::unordered_set<std::string> connected;
  int k = 0;
  for (auto& [key, e] : merged) {
    connected.insert(key.first);
    connected.insert(key.second);
    e.id = "e" + std::to_string(k++);
    e.source = key.first;
    e.target = key.second;
    e.route.clear();
    out.edges.push_back(std::move(e));
  }
  for (const Node& n : g.nodes) {
    if (alive.count(n.id) && connected.count(n.id)) out.nodes.push_back(n);
  }
  std::sort(out.nodes.begin(), out.nodes.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  return out;
}

ProcessGraph stitch(const std::vector<ProcessGraph>& patches, const patch::WindowIndex& index,
                    const StitchConfig& cfg) {
  check(cfg);
  const int size = index.patch_size;
  if (patches.size() != index.windows.size()) {
    throw DataError("window index lists " + std::to_string(index.windows.size()) +
                    " windows but " + std::to_string(patches.size()) + " patch graphs were given");
  }
  if (size <= 0) throw DataError("window index: patch size must be > 0");
  std::vector<patch::Origin> origins;
  for (const auto& w : index.windows) {
    const auto& o = w.origin;
    if (o.x0 < 0 || o.y0 < 0 || o.x0 + size > std::max(index.canvas.width, size) ||
        o.y0 + size > std::max(index.canvas.height, size)) {
      throw DataError("window index: window (" + std::to_string(o.x0) + ", " +
                      std::to_string(o.y0) + ") lies outside the canvas");
    }
    origins.push_back(o);
  }
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (patches[i].stage != Stage::kPatch) {
      throw DataError("patch " + std::to_string(i) + " is not a patch-stage graph");
    }
  }

  const auto n = static_cast<std::ptrdiff_t>(patches.size());
  std::vector<ProcessGraph> local(patches.size());
  std::vector<ProcessGraph> global(patches.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    local[i] = attenuate(patches[i], origins[i], size, index.canvas, cfg.margin);
    global[i] = local[i];
    for (Node& node : global[i].nodes) {
      node.box = node.box.translated(origins[i].x0, origins[i].y0);
    }
  }

  const Fusion fusion = fuse_nodes(global, cfg);
  ProcessGraph merged;
  merged.canvas = index.canvas;
  merged.stage = Stage::kStitched;
  for (const auto& f : fusion.nodes) merged.nodes.push_back(f.node);
  for (std::size_t p = 0; p < local.size(); ++p) {
    for (const Edge& e : local[p].edges) {
      const auto s = fusion.remap.find({p, e.source});
      const auto t = fusion.remap.find({p, e.target});
      if (s == fusion.remap.end() || t == fusion.remap.end()) continue;
      Edge g = e;
      g.source = s->second;
      g.target = t->second;
      merged.edges.push_back(std::move(g));
    }
  }
  for (Edge& e : match_borders(border_halves(local, origins, size, fusion), cfg)) {
    merged.edges.push_back(std::move(e));
  }
  return finalize(merged, cfg);
}

}  // namespace pidforge::stitch
