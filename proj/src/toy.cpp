#include "pidforge/toy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pidforge/generator.hpp"
#include "pidforge/graph.hpp"

namespace pidforge::toy {
namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x70797u};
  return Rng(seq);
}

bool chance(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Fisher-Yates with the standard uniform_int_distribution; std::shuffle's
// draw pattern is unspecified across standard libraries.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

struct Pipe {
  std::size_t u;
  std::size_t v;
  bool tree;
  EdgeClass cls;
  bool crossing = false;
  bool junction = false;
  int connectors = 0;
};

std::size_t find(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

Point along(const std::vector<Point>& path, double t) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    total += std::hypot(path[i + 1].x - path[i].x, path[i + 1].y - path[i].y);
  }
  double target = t * total;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double len = std::hypot(path[i + 1].x - path[i].x, path[i + 1].y - path[i].y);
    if (target <= len || i + 2 == path.size()) {
      const double f = len > 0 ? std::min(1.0, target / len) : 0.0;
      return {path[i].x + f * (path[i + 1].x - path[i].x),
              path[i].y + f * (path[i + 1].y - path[i].y)};
    }
    target -= len;
  }
  return path.back();
}

BBox marker(Point c) { return {c.x - 4.0, c.y - 4.0, c.x + 4.0, c.y + 4.0}; }

}  // namespace

ToyOptions small_options(std::uint64_t seed) {
  Rng rng = make_rng(seed ^ 0x5a5a5a5aULL);
  ToyOptions o;
  o.cols = 2 + static_cast<int>(pick(rng, 3));
  o.rows = 2 + static_cast<int>(pick(rng, 2));
  o.width = o.cols * 500;
  o.height = o.rows * 500;
  o.extra_edge_p = 0.4;
  o.crossing_p = 0.4;
  o.junction_p = 0.3;
  o.loop_p = 0.2;
  o.max_nodes = 30;
  return o;
}

ProcessGraph raw_plan(std::uint64_t seed, const ToyOptions& opts) {
  Rng rng = make_rng(seed);
  ProcessGraph g;
  g.stage = Stage::kRaw;
  g.canvas = {opts.width, opts.height};
  const auto& lib = gen::SymbolLibrary::builtin();

  // Physical symbols.
  const double sx = static_cast<double>(opts.width) / opts.cols;
  const double sy = static_cast<double>(opts.height) / opts.rows;
  std::uniform_real_distribution<double> jit(-opts.jitter, opts.jitter);
  std::vector<Point> centre;
  for (int r = 0; r < opts.rows; ++r) {
    for (int c = 0; c < opts.cols; ++c) {
      const NodeClass cls = kPhysicalClasses[pick(rng, kPhysicalClasses.size())];
      const gen::SymbolTemplate& t = *lib.of(cls).front();
      const double cx = std::round((c + 0.5) * sx + jit(rng));
      const double cy = std::round((r + 0.5) * sy + jit(rng));
      Node n;
      n.id = "n" + std::to_string(g.nodes.size());
      n.cls = cls;
      n.box = {cx - t.width / 2.0, cy - t.height / 2.0, cx + t.width / 2.0, cy + t.height / 2.0};
      centre.push_back(n.box.center());
      g.nodes.push_back(std::move(n));
    }
  }
  const std::size_t np = g.nodes.size();

  // Pipes: random spanning tree over grid neighbours plus extra links.
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (int r = 0; r < opts.rows; ++r) {
    for (int c = 0; c < opts.cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * opts.cols + c);
      if (c + 1 < opts.cols) links.emplace_back(i, i + 1);
      if (r + 1 < opts.rows) links.emplace_back(i, i + opts.cols);
    }
  }
  shuffle(links, rng);
  std::vector<std::size_t> parent(np);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<Pipe> pipes;
  for (auto [a, b] : links) {
    const bool tree = find(parent, a) != find(parent, b);
    if (tree) parent[find(parent, a)] = find(parent, b);
    if (!tree && !chance(rng, opts.extra_edge_p)) continue;
    const EdgeClass cls = chance(rng, opts.nonsolid_p) ? EdgeClass::kNonSolid : EdgeClass::kSolid;
    pipes.push_back({a, b, tree, cls});
  }

  // Connector budget from the target fraction f = C / (np + C).
  const double f = std::uniform_real_distribution<double>(opts.min_fraction, opts.max_fraction)(rng);
  int budget = static_cast<int>(std::lround(f * np / (1.0 - f)));
  if (opts.max_nodes > 0) budget = std::min(budget, opts.max_nodes - static_cast<int>(np));
  for (Pipe& p : pipes) {
    if (!p.tree && budget > 0 && chance(rng, opts.crossing_p)) {
      p.crossing = true;
      --budget;
    }
  }
  for (Pipe& p : pipes) {
    // A junction costs the branch connector plus one on the chain.
    if (np > 2 && budget >= 2 && chance(rng, opts.junction_p)) {
      p.junction = true;
      p.connectors = 1;
      budget -= 2;
    }
  }
  for (; budget > 0 && !pipes.empty(); --budget) ++pipes[pick(rng, pipes.size())].connectors;

  int next_conn = 0, next_cross = 0, next_edge = 0;
  auto add_marker = [&](NodeClass cls, Point c) {
    Node n;
    n.id = cls == NodeClass::kCrossing ? "x" + std::to_string(next_cross++)
                                       : "c" + std::to_string(next_conn++);
    n.cls = cls;
    n.box = marker(c);
    g.nodes.push_back(n);
    return g.nodes.back().id;
  };
  auto add_edge = [&](const std::string& a, const std::string& b, EdgeClass cls) {
    Edge e;
    e.id = "e" + std::to_string(next_edge++);
    e.source = a;
    e.target = b;
    e.cls = cls;
    g.edges.push_back(std::move(e));
  };
  auto chain_class = [&](EdgeClass base) {
    if (!chance(rng, opts.flip_p)) return base;
    return base == EdgeClass::kSolid ? EdgeClass::kNonSolid : EdgeClass::kSolid;
  };

  for (const Pipe& p : pipes) {
    const Point a = centre[p.u], b = centre[p.v];
    const Point corner = chance(rng, 0.5) ? Point{b.x, a.y} : Point{a.x, b.y};
    const std::vector<Point> path{a, corner, b};
    std::vector<std::string> chain{g.nodes[p.u].id};
    std::vector<Point> pos{a};
    for (int k = 1; k <= p.connectors; ++k) {
      const Point c = along(path, static_cast<double>(k) / (p.connectors + 1));
      chain.push_back(add_marker(NodeClass::kConnector, c));
      pos.push_back(c);
    }
    chain.push_back(g.nodes[p.v].id);
    pos.push_back(b);

    const std::size_t segments = chain.size() - 1;
    const std::size_t cross_at = p.crossing ? pick(rng, segments) : segments;
    for (std::size_t s = 0; s < segments; ++s) {
      if (s == cross_at) {
        const Point mid{(pos[s].x + pos[s + 1].x) / 2.0, (pos[s].y + pos[s + 1].y) / 2.0};
        const std::string x = add_marker(NodeClass::kCrossing, mid);
        add_edge(chain[s], x, chain_class(p.cls));
        add_edge(x, chain[s + 1], chain_class(p.cls));
      } else {
        add_edge(chain[s], chain[s + 1], chain_class(p.cls));
      }
    }
    if (chain.size() >= 5 && chance(rng, opts.loop_p)) {
      const std::size_t i = 1 + pick(rng, chain.size() - 4);
      add_edge(chain[i], chain[i + 2], chain_class(p.cls));
    }
    if (p.junction) {
      std::size_t w = pick(rng, np);
      while (w == p.u || w == p.v) w = pick(rng, np);
      const std::size_t j = 1 + pick(rng, chain.size() - 2);
      const Point cj = pos[j];
      const std::string br = add_marker(NodeClass::kConnector, {centre[w].x, cj.y});
      add_edge(chain[j], br, chain_class(p.cls));
      add_edge(br, g.nodes[w].id, chain_class(p.cls));
    }
  }
  return g;
}

ProcessGraph collapsed_plan(std::uint64_t seed, const ToyOptions& opts) {
  ProcessGraph g = collapse(raw_plan(seed, opts)).graph;
  // Crossing deletion may cut the only pipe of a symbol.
  std::vector<int> degree(g.nodes.size(), 0);
  const auto index = g.node_index();
  for (const Edge& e : g.edges) {
    ++degree[index.at(e.source)];
    ++degree[index.at(e.target)];
  }
  std::vector<Node> kept;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (degree[i] > 0) kept.push_back(g.nodes[i]);
  }
  g.nodes = std::move(kept);
  return g;
}

double connector_fraction(const ProcessGraph& raw) {
  if (raw.nodes.empty()) return 0.0;
  int markers = 0;
  for (const Node& n : raw.nodes) {
    markers += n.cls == NodeClass::kConnector || n.cls == NodeClass::kCrossing;
  }
  return static_cast<double>(markers) / raw.nodes.size();
}

}  // namespace pidforge::toy
