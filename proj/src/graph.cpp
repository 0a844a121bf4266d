#include "pidforge/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace pidforge {
namespace {

struct WorkEdge {
  std::size_t a;
  std::size_t b;
  EdgeClass cls;
  double confidence;
  std::string id;
};

struct Candidate {
  std::vector<std::string> sorted_connectors;
  std::vector<std::string> sequence;  // oriented from the smaller endpoint id
  std::vector<EdgeClass> chain;
  double confidence = 1.0;
  std::string id;
  const Edge* direct = nullptr;

  bool before(const Candidate& o) const {
    return std::tie(sorted_connectors, sequence) <
           std::tie(o.sorted_connectors, o.sequence);
  }
};

// Replaces each crossing node with virtual connectors, one per pair of
// neighbours that continue straight through it.
void bridge_crossings(ProcessGraph& g, std::vector<std::string>& warnings) {
  const auto index = g.node_index();
  std::vector<Node> extra_nodes;
  std::vector<Edge> kept;
  std::vector<Edge> extra_edges;
  std::map<std::string, std::vector<const Edge*>> incident;
  for (const Edge& e : g.edges) {
    auto s = index.find(e.source);
    auto t = index.find(e.target);
    bool touches = false;
    if (s != index.end() && g.nodes[s->second].cls == NodeClass::kCrossing) {
      incident[e.source].push_back(&e);
      touches = true;
    }
    if (t != index.end() && g.nodes[t->second].cls == NodeClass::kCrossing) {
      incident[e.target].push_back(&e);
      touches = true;
    }
    if (!touches) kept.push_back(e);
  }

  for (const auto& [xid, edges] : incident) {
    const Node& x = g.nodes[index.at(xid)];
    const Point c = x.box.center();
    struct Arm {
      const Edge* edge;
      std::string other;
      double ux, uy;
    };
    std::vector<Arm> arms;
    for (const Edge* e : edges) {
      const std::string& other = e->source == xid ? e->target : e->source;
      auto it = index.find(other);
      if (it == index.end() || other == xid) continue;
      const Point o = g.nodes[it->second].box.center();
      double dx = o.x - c.x, dy = o.y - c.y;
      const double n = std::hypot(dx, dy);
      if (n > 0) {
        dx /= n;
        dy /= n;
      }
      arms.push_back({e, other, dx, dy});
    }
    struct Pair {
      double dot;
      std::size_t i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < arms.size(); ++i)
      for (std::size_t j = i + 1; j < arms.size(); ++j)
        pairs.push_back({arms[i].ux * arms[j].ux + arms[i].uy * arms[j].uy, i, j});
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& a, const Pair& b) { return a.dot < b.dot; });
    std::vector<bool> used(arms.size(), false);
    int k = 0;
    for (const Pair& p : pairs) {
      if (used[p.i] || used[p.j]) continue;
      used[p.i] = used[p.j] = true;
      Node v = x;
      v.cls = NodeClass::kConnector;
      v.id = xid + "#" + std::to_string(k++);
      for (std::size_t arm : {p.i, p.j}) {
        Edge e = *arms[arm].edge;
        if (e.source == xid) e.source = v.id;
        if (e.target == xid) e.target = v.id;
        extra_edges.push_back(std::move(e));
      }
      extra_nodes.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < arms.size(); ++i) {
      if (!used[i]) {
        warnings.push_back("crossing " + xid + ": arm to " + arms[i].other +
                           " has no straight-through partner; dropped");
      }
    }
  }

  std::vector<Node> nodes;
  for (Node& n : g.nodes) {
    if (n.cls != NodeClass::kCrossing) nodes.push_back(std::move(n));
  }
  for (Node& n : extra_nodes) nodes.push_back(std::move(n));
  for (Edge& e : extra_edges) kept.push_back(std::move(e));
  g.nodes = std::move(nodes);
  g.edges = std::move(kept);
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& s : ids) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

}  // namespace

EdgeClass majority_class(const std::vector<EdgeClass>& chain) {
  const auto solid = std::count(chain.begin(), chain.end(), EdgeClass::kSolid);
  const auto other = static_cast<std::ptrdiff_t>(chain.size()) - solid;
  return solid >= other ? EdgeClass::kSolid : EdgeClass::kNonSolid;
}

CollapseResult collapse(const ProcessGraph& input, const CollapseOptions& opts) {
  if (input.stage != Stage::kRaw) {
    throw DataError("collapse expects a raw-stage graph, got '" +
                    std::string(to_string(input.stage)) + "'");
  }
  CollapseResult result;
  auto& warnings = result.warnings;
  ProcessGraph g = input;
  if (opts.crossing == CrossingMode::kBridge) bridge_crossings(g, warnings);

  const auto index = g.node_index();
  const std::size_t n = g.nodes.size();
  std::vector<bool> is_conn(n), is_phys(n);
  for (std::size_t i = 0; i < n; ++i) {
    is_conn[i] = g.nodes[i].cls == NodeClass::kConnector;
    is_phys[i] = is_physical(g.nodes[i].cls);
  }

  // Candidates keyed by ordered endpoint ids.
  std::map<std::pair<std::string, std::string>, Candidate> best;
  auto offer = [&](std::size_t p, std::size_t q, Candidate c) {
    const std::string& pid = g.nodes[p].id;
    const std::string& qid = g.nodes[q].id;
    if (pid > qid) {
      std::reverse(c.sequence.begin(), c.sequence.end());
      std::reverse(c.chain.begin(), c.chain.end());
    }
    auto key = edge_key(pid, qid);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), std::move(c));
    } else if (c.before(it->second)) {
      it->second = std::move(c);
    }
  };

  std::vector<WorkEdge> work;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> conn_adj(n);
  std::vector<int> conn_degree(n, 0);
  for (const Edge& e : g.edges) {
    auto s = index.find(e.source);
    auto t = index.find(e.target);
    if (s == index.end() || t == index.end()) {
      warnings.push_back("edge " + e.id + " references a missing node; ignored");
      continue;
    }
    const std::size_t a = s->second, b = t->second;
    if (a == b) {
      warnings.push_back("edge " + e.id + " is a self-loop; ignored");
      continue;
    }
    if (!is_conn[a] && !is_phys[a]) continue;  // crossing or border
    if (!is_conn[b] && !is_phys[b]) continue;
    if (is_phys[a] && is_phys[b]) {
      Candidate c;
      c.chain = {e.cls};
      c.confidence = e.confidence;
      c.id = e.id;
      c.direct = &e;
      offer(a, b, std::move(c));
      continue;
    }
    const std::size_t idx = work.size();
    work.push_back({a, b, e.cls, e.confidence, e.id});
    if (is_conn[a]) {
      conn_adj[a].push_back({b, idx});
      ++conn_degree[a];
    }
    if (is_conn[b]) {
      conn_adj[b].push_back({a, idx});
      ++conn_degree[b];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (is_conn[i] && conn_degree[i] <= 1) {
      warnings.push_back("dangling connector " + g.nodes[i].id +
                         " (degree " + std::to_string(conn_degree[i]) +
                         "); dropped");
    }
  }

  // Connector components over connector-connector edges.
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_conn[i] || comp[i] >= 0) continue;
    std::vector<std::size_t> stack{i};
    comp[i] = ncomp;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (auto [w, _] : conn_adj[v]) {
        if (is_conn[w] && comp[w] < 0) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
      }
    }
    ++ncomp;
  }

  struct Attach {
    std::size_t conn;
    std::size_t phys;
    std::size_t edge;
  };
  std::vector<std::vector<std::size_t>> members(ncomp);
  std::vector<std::vector<Attach>> attaches(ncomp);
  std::vector<std::size_t> internal_edges(ncomp, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_conn[i]) members[comp[i]].push_back(i);
  }
  for (std::size_t k = 0; k < work.size(); ++k) {
    const WorkEdge& e = work[k];
    if (is_conn[e.a] && is_conn[e.b]) {
      ++internal_edges[comp[e.a]];
    } else if (is_conn[e.a]) {
      attaches[comp[e.a]].push_back({e.a, e.b, k});
    } else {
      attaches[comp[e.b]].push_back({e.b, e.a, k});
    }
  }

  int self_loops = 0;
  auto emit = [&](const Attach& from, const Attach& to,
                  const std::vector<std::size_t>& conn_path,
                  const std::vector<std::size_t>& edge_path) {
    if (from.phys == to.phys) {
      ++self_loops;
      return;
    }
    Candidate c;
    c.chain.push_back(work[from.edge].cls);
    double conf = work[from.edge].confidence;
    for (std::size_t k : edge_path) {
      c.chain.push_back(work[k].cls);
      conf = std::min(conf, work[k].confidence);
    }
    c.chain.push_back(work[to.edge].cls);
    conf = std::min(conf, work[to.edge].confidence);
    c.confidence = conf;
    for (std::size_t v : conn_path) c.sequence.push_back(g.nodes[v].id);
    c.sorted_connectors = c.sequence;
    std::sort(c.sorted_connectors.begin(), c.sorted_connectors.end());
    const bool forward = g.nodes[from.phys].id < g.nodes[to.phys].id;
    c.id = forward ? work[from.edge].id + "+" + work[to.edge].id
                   : work[to.edge].id + "+" + work[from.edge].id;
    offer(from.phys, to.phys, std::move(c));
  };

  for (int ci = 0; ci < ncomp; ++ci) {
    const auto& att = attaches[ci];
    if (att.empty()) {
      std::vector<std::string> ids;
      for (std::size_t v : members[ci]) ids.push_back(g.nodes[v].id);
      if (members[ci].size() > 1) {
        warnings.push_back("connector group {" + join_ids(ids) +
                           "} reaches no physical node; dropped");
      }
      continue;
    }
    std::vector<std::vector<std::size_t>> at_conn(n);
    for (std::size_t j = 0; j < att.size(); ++j) at_conn[att[j].conn].push_back(j);

    const bool is_tree = internal_edges[ci] + 1 == members[ci].size();
    if (is_tree) {
      // Unique connector path between any two attachment points.
      for (std::size_t i = 0; i < att.size(); ++i) {
        std::map<std::size_t, std::pair<std::size_t, std::size_t>> parent;
        parent[att[i].conn] = {att[i].conn, SIZE_MAX};
        std::vector<std::size_t> queue{att[i].conn};
        for (std::size_t head = 0; head < queue.size(); ++head) {
          const std::size_t v = queue[head];
          for (auto [w, k] : conn_adj[v]) {
            if (!is_conn[w] || parent.count(w)) continue;
            parent[w] = {v, k};
            queue.push_back(w);
          }
        }
        for (std::size_t j = i + 1; j < att.size(); ++j) {
          std::vector<std::size_t> conns, edges;
          for (std::size_t v = att[j].conn;;) {
            conns.push_back(v);
            auto [pv, pk] = parent.at(v);
            if (pk == SIZE_MAX) break;
            edges.push_back(pk);
            v = pv;
          }
          std::reverse(conns.begin(), conns.end());
          std::reverse(edges.begin(), edges.end());
          emit(att[i], att[j], conns, edges);
        }
      }
      continue;
    }

    // Cyclic group: enumerate simple connector paths.
    std::vector<bool> on_path(n, false);
    std::vector<std::size_t> conns, edges;
    for (std::size_t i = 0; i < att.size(); ++i) {
      std::function<void(std::size_t)> dfs = [&](std::size_t v) {
        on_path[v] = true;
        conns.push_back(v);
        for (std::size_t j : at_conn[v]) {
          if (j > i) emit(att[i], att[j], conns, edges);
        }
        for (auto [w, k] : conn_adj[v]) {
          if (!is_conn[w] || on_path[w]) continue;
          edges.push_back(k);
          dfs(w);
          edges.pop_back();
        }
        conns.pop_back();
        on_path[v] = false;
      };
      dfs(att[i].conn);
    }
  }
  if (self_loops > 0) {
    warnings.push_back(std::to_string(self_loops) +
                       " connector chain(s) returned to their own start node; "
                       "dropped");
  }

  ProcessGraph& out = result.graph;
  out.canvas = g.canvas;
  out.stage = Stage::kCollapsed;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_phys[i]) out.nodes.push_back(g.nodes[i]);
  }
  std::unordered_set<std::string> used_ids;
  for (auto& [key, c] : best) {
    Edge e;
    if (c.direct != nullptr) {
      e = *c.direct;
      e.source = key.first;
      e.target = key.second;
      if (c.direct->source != key.first) std::reverse(e.route.begin(), e.route.end());
    } else {
      e.id = c.id;
      e.source = key.first;
      e.target = key.second;
      e.cls = majority_class(c.chain);
      e.confidence = c.confidence;
    }
    std::string base = e.id;
    for (int k = 1; !used_ids.insert(e.id).second; ++k) {
      e.id = base + "#" + std::to_string(k);
    }
    out.edges.push_back(std::move(e));
  }
  return result;
}

GraphStats compute_stats(const ProcessGraph& g) {
  GraphStats s;
  s.node_count = static_cast<int>(g.nodes.size());
  s.edge_count = static_cast<int>(g.edges.size());
  const auto index = g.node_index();
  std::vector<int> degree(g.nodes.size(), 0);
  for (const Edge& e : g.edges) {
    auto a = index.find(e.source);
    auto b = index.find(e.target);
    if (a != index.end()) ++degree[a->second];
    if (b != index.end()) ++degree[b->second];
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    ++s.degree_histogram[degree[i]];
    ++s.class_counts[g.nodes[i].cls];
  }
  s.edge_density = s.node_count == 0
                       ? 0.0
                       : static_cast<double>(s.edge_count) / s.node_count;
  return s;
}

std::vector<Violation> validate(const ProcessGraph& g) {
  std::vector<Violation> out;
  std::unordered_set<std::string> ids;
  const bool finalized = g.stage == Stage::kCollapsed ||
                         g.stage == Stage::kStitched;
  for (const Node& n : g.nodes) {
    if (!ids.insert(n.id).second) {
      out.push_back({n.id, "unique-node-id", "node id appears more than once"});
    }
    if (!n.box.valid()) {
      out.push_back({n.id, "box", "box must satisfy 0 <= x1 < x2, 0 <= y1 < y2"});
    }
    if (!(n.confidence >= 0.0 && n.confidence <= 1.0)) {
      out.push_back({n.id, "confidence-range", "confidence outside [0,1]"});
    }
    if (finalized && (n.cls == NodeClass::kConnector ||
                      n.cls == NodeClass::kCrossing)) {
      out.push_back({n.id, "stage-class",
                     std::string(to_string(n.cls)) + " node in " +
                         std::string(to_string(g.stage)) + " graph"});
    }
    if (n.cls == NodeClass::kBorder && g.stage != Stage::kPatch) {
      out.push_back({n.id, "stage-class", "border node outside a patch graph"});
    }
  }
  std::set<std::pair<std::string, std::string>> pairs;
  std::unordered_set<std::string> edge_ids;
  for (const Edge& e : g.edges) {
    if (!edge_ids.insert(e.id).second) {
      out.push_back({e.id, "unique-edge-id", "edge id appears more than once"});
    }
    for (const std::string* end : {&e.source, &e.target}) {
      if (!ids.count(*end)) {
        out.push_back({e.id, "referential-integrity",
                       "endpoint '" + *end + "' does not exist"});
      }
    }
    if (e.source == e.target && g.stage != Stage::kRaw) {
      out.push_back({e.id, "self-loop", "edge joins a node to itself"});
    }
    if (!pairs.insert(edge_key(e.source, e.target)).second) {
      out.push_back({e.id, "parallel-edge",
                     "more than one edge between " + e.source + " and " + e.target});
    }
    if (!(e.confidence >= 0.0 && e.confidence <= 1.0)) {
      out.push_back({e.id, "confidence-range", "confidence outside [0,1]"});
    }
  }
  return out;
}

std::string format_violations(const std::vector<Violation>& v) {
  std::ostringstream os;
  for (const auto& x : v) os << x.subject << ": [" << x.rule << "] " << x.message << '\n';
  return os.str();
}

}  // namespace pidforge
