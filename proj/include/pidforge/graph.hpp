#pragma once

#include <map>
#include <string>
#include <vector>

#include "pidforge/types.hpp"

namespace pidforge {

enum class CrossingMode : std::uint8_t {
  kDelete,  // drop crossing nodes together with their incident edges
  kBridge,  // reconnect straight-through neighbour pairs by collinearity
};

struct CollapseOptions {
  CrossingMode crossing = CrossingMode::kDelete;
};

struct CollapseResult {
  ProcessGraph graph;
  std::vector<std::string> warnings;
};

/// Contracts connector chains into direct edges between the physical nodes at
/// their ends and removes crossing markers.
///
/// Every path p - c1 - ... - ck - q whose interior nodes are all connectors
/// becomes an edge (p, q) labelled with the majority edge class along the
/// k+1 chain edges (ties resolve to solid). When several chains (or a direct
/// edge) join the same pair, the one with the lexicographically smallest
/// sorted connector-id list wins. Chains that start and end at the same
/// physical node are dropped, as are connector groups that touch no
/// physical node at all. Throws DataError unless g.stage is raw.
CollapseResult collapse(const ProcessGraph& g, const CollapseOptions& opts = {});

/// Majority edge class of a chain; ties go to solid.
EdgeClass majority_class(const std::vector<EdgeClass>& chain);

struct GraphStats {
  std::map<int, int> degree_histogram;
  double edge_density = 0.0;  // |E| / |V|, 0 for the empty graph
  int node_count = 0;
  int edge_count = 0;
  std::map<NodeClass, int> class_counts;
};

GraphStats compute_stats(const ProcessGraph& g);

struct Violation {
  std::string subject;  // node or edge id, or "graph"
  std::string rule;
  std::string message;
};

/// Checks every type invariant. Violations are data, not failures.
std::vector<Violation> validate(const ProcessGraph& g);

std::string format_violations(const std::vector<Violation>& v);

}  // namespace pidforge
