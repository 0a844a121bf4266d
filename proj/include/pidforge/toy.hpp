#pragma once

// Seeded synthetic raw annotations: physical symbols on a jittered grid,
// pipes drawn as connector chains, optional crossings, junctions and
// connector loops. Used for bundled seeds, tests and benchmarks.

#include <cstdint>

#include "pidforge/types.hpp"

namespace pidforge::toy {

struct ToyOptions {
  int width = 3000;
  int height = 3000;
  int cols = 6;  // physical node grid
  int rows = 6;
  double jitter = 80.0;          // max centre offset from the grid point, px
  double extra_edge_p = 0.25;    // non-tree grid-neighbour pipes
  double nonsolid_p = 0.3;       // pipe class
  double flip_p = 0.2;           // per chain edge, against the pipe class
  double crossing_p = 0.3;       // per non-tree pipe
  double junction_p = 0.0;       // per pipe, branch to a third node
  double loop_p = 0.0;           // per chain, connector-connector shortcut
  double min_fraction = 0.52;    // connector + crossing share of all nodes
  double max_fraction = 0.62;
  int max_nodes = 0;             // 0: unlimited
};

/// Options for small graphs (at most 30 nodes) exercising every collapse
/// path: junctions, loops and crossings.
ToyOptions small_options(std::uint64_t seed);

ProcessGraph raw_plan(std::uint64_t seed, const ToyOptions& opts = {});

/// raw_plan followed by collapse() in crossing-delete mode.
ProcessGraph collapsed_plan(std::uint64_t seed, const ToyOptions& opts = {});

/// Share of connector and crossing nodes.
double connector_fraction(const ProcessGraph& raw);

}  // namespace pidforge::toy
