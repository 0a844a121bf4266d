#include "pidforge/types.hpp"

#include <cmath>

namespace pidforge {

std::string_view to_string(NodeClass c) {
  switch (c) {
    case NodeClass::kValve: return "valve";
    case NodeClass::kPump: return "pump";
    case NodeClass::kInstrumentation: return "instrumentation";
    case NodeClass::kGeneral: return "general";
    case NodeClass::kTank: return "tank";
    case NodeClass::kArrow: return "arrow";
    case NodeClass::kInletOutlet: return "inlet_outlet";
    case NodeClass::kConnector: return "connector";
    case NodeClass::kCrossing: return "crossing";
    case NodeClass::kBorder: return "border";
  }
  return "?";
}

std::string_view to_string(EdgeClass c) {
  return c == EdgeClass::kSolid ? "solid" : "non_solid";
}

NodeClass parse_node_class(std::string_view s) {
  static constexpr std::array<NodeClass, 10> all = {
      NodeClass::kValve,     NodeClass::kPump,    NodeClass::kInstrumentation,
      NodeClass::kGeneral,   NodeClass::kTank,    NodeClass::kArrow,
      NodeClass::kInletOutlet, NodeClass::kConnector, NodeClass::kCrossing,
      NodeClass::kBorder};
  for (NodeClass c : all) {
    if (to_string(c) == s) return c;
  }
  if (s == "inlet/outlet") return NodeClass::kInletOutlet;
  throw VocabularyError("unknown node class '" + std::string(s) + "'");
}

EdgeClass parse_edge_class(std::string_view s) {
  if (s == "solid") return EdgeClass::kSolid;
  if (s == "non_solid" || s == "non-solid") return EdgeClass::kNonSolid;
  throw VocabularyError("unknown edge class '" + std::string(s) + "'");
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kRaw: return "raw";
    case Stage::kCollapsed: return "collapsed";
    case Stage::kPatch: return "patch";
    case Stage::kStitched: return "stitched";
  }
  return "?";
}

Stage parse_stage(std::string_view s) {
  if (s == "raw") return Stage::kRaw;
  if (s == "collapsed") return Stage::kCollapsed;
  if (s == "patch") return Stage::kPatch;
  if (s == "stitched") return Stage::kStitched;
  throw VocabularyError("unknown stage '" + std::string(s) + "'");
}

bool BBox::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 >= 0.0 && y1 >= 0.0 && x1 < x2 && y1 < y2;
}

const Node* ProcessGraph::find_node(std::string_view id) const {
  for (const Node& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::unordered_map<std::string, std::size_t> ProcessGraph::node_index() const {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].id, i);
  return index;
}

std::vector<std::vector<std::size_t>> ProcessGraph::adjacency() const {
  const auto index = node_index();
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (const Edge& e : edges) {
    auto s = index.find(e.source);
    auto t = index.find(e.target);
    if (s == index.end() || t == index.end()) continue;
    adj[s->second].push_back(t->second);
    if (s->second != t->second) adj[t->second].push_back(s->second);
  }
  return adj;
}

}  // namespace pidforge
