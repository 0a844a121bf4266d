// Regenerates the bundled toy data: one raw annotated plan with a sidecar
// of expected counts, and three collapsed seed plans for corpus generation.
//
//   make_toy_data <data-dir>

#include <filesystem>
#include <iostream>

#include "json.hpp"
#include "pidforge/annot_io.hpp"
#include "pidforge/graph.hpp"
#include "pidforge/toy.hpp"

namespace fs = std::filesystem;
using namespace pidforge;

namespace {

nlohmann::ordered_json counts(const ProcessGraph& g) {
  const GraphStats s = compute_stats(g);
  nlohmann::ordered_json classes;
  for (auto [cls, n] : s.class_counts) classes[std::string(to_string(cls))] = n;
  return {{"nodes", s.node_count}, {"edges", s.edge_count}, {"classes", classes}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_toy_data <data-dir>\n";
    return 1;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir / "seeds");

  toy::ToyOptions raw_opts;
  raw_opts.junction_p = 0.1;
  raw_opts.loop_p = 0.1;
  const ProcessGraph raw = toy::raw_plan(2024, raw_opts);
  const CollapseResult collapsed = collapse(raw);
  io::write_graphml(raw, dir / "toy_plan_raw.graphml");
  nlohmann::ordered_json side;
  side["schema_version"] = io::kSchemaVersion;
  side["connector_fraction"] = toy::connector_fraction(raw);
  side["raw"] = counts(raw);
  side["collapsed"] = counts(collapsed.graph);
  io::write_text(dir / "toy_plan_raw.json", side.dump(2) + "\n");

  for (int i = 0; i < 3; ++i) {
    const ProcessGraph seed = toy::collapsed_plan(100 + i);
    io::write_graphml(seed, dir / "seeds" / ("toy_seed_" + std::to_string(i) + ".graphml"));
  }
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}
