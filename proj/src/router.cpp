#include <algorithm>
#include <climits>
#include <cmath>
#include <queue>
#include <tuple>

#include "pidforge/generator.hpp"

namespace pidforge::gen {
namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};
constexpr int kBendPenalty = 2;

constexpr int reverse_dir(int d) { return d ^ 1; }

struct CellRange {
  int c1, c2, r1, r2;
};

CellRange cells_of(const BBox& b, int cell) {
  return {static_cast<int>(std::floor(b.x1 / cell)),
          static_cast<int>(std::ceil(b.x2 / cell)) - 1,
          static_cast<int>(std::floor(b.y1 / cell)),
          static_cast<int>(std::ceil(b.y2 / cell)) - 1};
}

void append_point(std::vector<Point>& pts, Point p) {
  if (!pts.empty() && pts.back() == p) return;
  // Drop the middle of three collinear points.
  if (pts.size() >= 2) {
    const Point& a = pts[pts.size() - 2];
    const Point& b = pts.back();
    if ((a.x == b.x && b.x == p.x) || (a.y == b.y && b.y == p.y)) {
      pts.back() = p;
      return;
    }
  }
  pts.push_back(p);
}

bool ranges_overlap(double a1, double a2, double b1, double b2) {
  return std::max(a1, b1) < std::min(a2, b2);
}

Route l_route(const BBox& from, const BBox& to) {
  Route r;
  r.fallback = true;
  const Point a = from.center();
  const Point b = to.center();
  if (ranges_overlap(from.y1, from.y2, to.y1, to.y2)) {
    const double y = (std::max(from.y1, to.y1) + std::min(from.y2, to.y2)) / 2.0;
    const bool right = b.x >= a.x;
    r.polyline = {{right ? from.x2 : from.x1, y}, {right ? to.x1 : to.x2, y}};
  } else if (ranges_overlap(from.x1, from.x2, to.x1, to.x2)) {
    const double x = (std::max(from.x1, to.x1) + std::min(from.x2, to.x2)) / 2.0;
    const bool down = b.y >= a.y;
    r.polyline = {{x, down ? from.y2 : from.y1}, {x, down ? to.y1 : to.y2}};
  } else {
    const bool right = b.x >= a.x;
    const bool down = b.y >= a.y;
    r.polyline = {{right ? from.x2 : from.x1, a.y}, {b.x, a.y}, {b.x, down ? to.y1 : to.y2}};
    r.bends = 1;
  }
  return r;
}

}  // namespace

OccupancyGrid build_grid(const ProcessGraph& g, int cell) {
  OccupancyGrid grid;
  grid.cell = cell;
  grid.cols = (g.canvas.width + cell - 1) / cell;
  grid.rows = (g.canvas.height + cell - 1) / cell;
  grid.blocked.assign(static_cast<std::size_t>(grid.cols) * grid.rows, 0);
  for (const Node& n : g.nodes) {
    const CellRange r = cells_of(n.box, cell);
    for (int cy = std::max(0, r.r1 - 1); cy <= std::min(grid.rows - 1, r.r2 + 1); ++cy) {
      for (int cx = std::max(0, r.c1 - 1); cx <= std::min(grid.cols - 1, r.c2 + 1); ++cx) {
        grid.blocked[static_cast<std::size_t>(cy) * grid.cols + cx] = 1;
      }
    }
  }
  return grid;
}

std::vector<Terminal> terminals(const BBox& box, const OccupancyGrid& grid) {
  std::vector<Terminal> out;
  const CellRange r = cells_of(box, grid.cell);
  auto add = [&](int cx, int cy, int dir, Point on_box) {
    if (grid.inside(cx, cy) && !grid.is_blocked(cx, cy)) out.push_back({cx, cy, dir, on_box});
  };
  for (int cy = r.r1; cy <= r.r2; ++cy) {
    const double y = grid.center_of(0, cy).y;
    if (y < box.y1 || y > box.y2) continue;
    add(r.c2 + 2, cy, 0, {box.x2, y});
    add(r.c1 - 2, cy, 1, {box.x1, y});
  }
  for (int cx = r.c1; cx <= r.c2; ++cx) {
    const double x = grid.center_of(cx, 0).x;
    if (x < box.x1 || x > box.x2) continue;
    add(cx, r.r2 + 2, 2, {x, box.y2});
    add(cx, r.r1 - 2, 3, {x, box.y1});
  }
  return out;
}

Route route_between(const BBox& from, const BBox& to, const OccupancyGrid& grid) {
  const auto sources = terminals(from, grid);
  const auto goals = terminals(to, grid);
  if (sources.empty() || goals.empty()) return l_route(from, to);

  const int ncells = grid.cols * grid.rows;
  std::vector<int> goal_at(ncells, -1);
  int gx1 = INT_MAX, gx2 = INT_MIN, gy1 = INT_MAX, gy2 = INT_MIN;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    goal_at[goals[i].cy * grid.cols + goals[i].cx] = static_cast<int>(i);
    gx1 = std::min(gx1, goals[i].cx);
    gx2 = std::max(gx2, goals[i].cx);
    gy1 = std::min(gy1, goals[i].cy);
    gy2 = std::max(gy2, goals[i].cy);
  }
  auto heuristic = [&](int cx, int cy) {
    const int dx = cx < gx1 ? gx1 - cx : (cx > gx2 ? cx - gx2 : 0);
    const int dy = cy < gy1 ? gy1 - cy : (cy > gy2 ? cy - gy2 : 0);
    return dx + dy;
  };

  const std::size_t nstates = static_cast<std::size_t>(ncells) * 4;
  std::vector<int> dist(nstates, INT_MAX);
  std::vector<int> parent(nstates, -1);
  using Entry = std::tuple<int, int, int>;  // f, g, state
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  for (const Terminal& s : sources) {
    const int st = (s.cy * grid.cols + s.cx) * 4 + s.dir;
    if (dist[st] == 0) continue;
    dist[st] = 0;
    open.emplace(heuristic(s.cx, s.cy), 0, st);
  }

  int best_total = INT_MAX;
  int best_state = -1;
  while (!open.empty()) {
    const auto [f, g, st] = open.top();
    open.pop();
    if (f >= best_total) break;
    if (g > dist[st]) continue;
    const int cellidx = st / 4;
    const int dir = st % 4;
    const int cx = cellidx % grid.cols;
    const int cy = cellidx / grid.cols;
    if (const int gi = goal_at[cellidx]; gi >= 0) {
      const int needed = reverse_dir(goals[gi].dir);
      const int total = g + (dir == needed ? 0 : kBendPenalty);
      if (total < best_total) {
        best_total = total;
        best_state = st;
      }
    }
    for (int nd = 0; nd < 4; ++nd) {
      if (nd == reverse_dir(dir)) continue;
      const int nx = cx + kDx[nd];
      const int ny = cy + kDy[nd];
      if (!grid.inside(nx, ny) || grid.is_blocked(nx, ny)) continue;
      const int ng = g + 1 + (nd == dir ? 0 : kBendPenalty);
      const int ns = (ny * grid.cols + nx) * 4 + nd;
      if (ng < dist[ns]) {
        dist[ns] = ng;
        parent[ns] = st;
        open.emplace(ng + heuristic(nx, ny), ng, ns);
      }
    }
  }
  if (best_state < 0) return l_route(from, to);

  std::vector<int> chain;
  for (int st = best_state; st >= 0; st = parent[st]) chain.push_back(st);
  std::reverse(chain.begin(), chain.end());

  const int first_cell = chain.front() / 4;
  const int first_dir = chain.front() % 4;
  const Terminal* src = nullptr;
  for (const Terminal& s : sources) {
    if (s.cy * grid.cols + s.cx == first_cell && s.dir == first_dir) {
      src = &s;
      break;
    }
  }
  const Terminal& dst = goals[goal_at[chain.back() / 4]];

  Route r;
  r.steps = static_cast<int>(chain.size()) - 1;
  append_point(r.polyline, src->on_box);
  int prev_dir = first_dir;
  for (int st : chain) {
    const int c = st / 4;
    if (st % 4 != prev_dir) ++r.bends;
    prev_dir = st % 4;
    append_point(r.polyline, grid.center_of(c % grid.cols, c / grid.cols));
  }
  if (prev_dir != reverse_dir(dst.dir)) ++r.bends;
  append_point(r.polyline, dst.on_box);
  return r;
}

std::vector<Route> route_edges(ProcessGraph& g, const GenConfig& cfg) {
  const OccupancyGrid grid = build_grid(g, cfg.grid_cell);
  const auto index = g.node_index();
  std::vector<Route> routes(g.edges.size());
  const auto n = static_cast<std::ptrdiff_t>(g.edges.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Edge& e = g.edges[i];
    const BBox& a = g.nodes[index.at(e.source)].box;
    const BBox& b = g.nodes[index.at(e.target)].box;
    routes[i] = route_between(a, b, grid);
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) g.edges[i].route = routes[i].polyline;
  return routes;
}

}  // namespace pidforge::gen
