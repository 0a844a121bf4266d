#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "pidforge/annot_io.hpp"
#include "pidforge/toy.hpp"

using namespace pidforge;

namespace {

const std::string kData = PIDFORGE_DATA_DIR;

std::string graphml_with(const std::string& body) {
  return R"(<?xml version="1.0" encoding="UTF-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <key id="cls" for="node" attr.name="cls" attr.type="string"/>
  <key id="x1" for="node" attr.name="x1" attr.type="double"/>
  <key id="y1" for="node" attr.name="y1" attr.type="double"/>
  <key id="x2" for="node" attr.name="x2" attr.type="double"/>
  <key id="y2" for="node" attr.name="y2" attr.type="double"/>
  <key id="ecls" for="edge" attr.name="cls" attr.type="string"/>
  <graph id="G" edgedefault="undirected">
)" + body + R"(
  </graph>
</graphml>
)";
}

}  // namespace

TEST_CASE("bundled raw toy plan matches its sidecar counts") {
  const auto g = io::read_graphml(kData + "/toy_plan_raw.graphml");
  const auto side = nlohmann::json::parse(io::read_text(kData + "/toy_plan_raw.json"));
  CHECK(g.stage == Stage::kRaw);
  CHECK(static_cast<int>(g.nodes.size()) == side["raw"]["nodes"].get<int>());
  CHECK(static_cast<int>(g.edges.size()) == side["raw"]["edges"].get<int>());
  const auto stats = compute_stats(g);
  for (const auto& [name, count] : side["raw"]["classes"].items()) {
    CHECK(stats.class_counts.at(parse_node_class(name)) == count.get<int>());
  }
  const auto c = collapse(g).graph;
  CHECK(static_cast<int>(c.nodes.size()) == side["collapsed"]["nodes"].get<int>());
  CHECK(static_cast<int>(c.edges.size()) == side["collapsed"]["edges"].get<int>());
}

TEST_CASE("hand-counted smallest plan") {
  // Two valves joined through one connector, plus a direct tank link.
  const auto g = io::parse_graphml(graphml_with(R"(
    <node id="a"><data key="cls">valve</data><data key="x1">0</data><data key="y1">0</data><data key="x2">10</data><data key="y2">10</data></node>
    <node id="c"><data key="cls">connector</data><data key="x1">20</data><data key="y1">0</data><data key="x2">28</data><data key="y2">8</data></node>
    <node id="b"><data key="cls">valve</data><data key="x1">40</data><data key="y1">0</data><data key="x2">50</data><data key="y2">10</data></node>
    <node id="t"><data key="cls">tank</data><data key="x1">0</data><data key="y1">40</data><data key="x2">20</data><data key="y2">80</data></node>
    <edge id="e0" source="a" target="c"><data key="ecls">solid</data></edge>
    <edge id="e1" source="c" target="b"><data key="ecls">non_solid</data></edge>
    <edge id="e2" source="a" target="t"><data key="ecls">solid</data></edge>)"));
  CHECK(g.nodes.size() == 4);
  CHECK(g.edges.size() == 3);
  CHECK(g.stage == Stage::kRaw);
  CHECK(g.nodes[0].confidence == 1.0);
  CHECK(g.edges[1].cls == EdgeClass::kNonSolid);
  CHECK(g.nodes[3].box == BBox{0, 40, 20, 80});
}

TEST_CASE("missing y2 names the node") {
  const std::string xml = graphml_with(R"(
    <node id="broken7"><data key="cls">valve</data><data key="x1">0</data><data key="y1">0</data><data key="x2">10</data></node>)");
  try {
    io::parse_graphml(xml);
    FAIL("expected SchemaError");
  } catch (const io::SchemaError& e) {
    CHECK(std::string(e.what()).find("broken7") != std::string::npos);
    CHECK(std::string(e.what()).find("y2") != std::string::npos);
  }
}

TEST_CASE("unknown class is a vocabulary error") {
  const std::string xml = graphml_with(R"(
    <node id="n"><data key="cls">reactor</data><data key="x1">0</data><data key="y1">0</data><data key="x2">10</data><data key="y2">10</data></node>)");
  CHECK_THROWS_AS(io::parse_graphml(xml), VocabularyError);
}

TEST_CASE("empty graph element") {
  const auto g = io::parse_graphml(graphml_with(""));
  CHECK(g.nodes.empty());
  CHECK(g.edges.empty());
}

TEST_CASE("malformed XML reports a line number") {
  const std::string xml = "<?xml version=\"1.0\"?>\n<graphml>\n<graph>\n<node id=\"a\">\n</graph>\n";
  try {
    io::parse_graphml(xml);
    FAIL("expected ParseError");
  } catch (const io::ParseError& e) {
    CHECK(e.line() >= 4);
  }
}

TEST_CASE("toy plan round-trips through a file") {
  oracle::TempDir dir("annot");
  const auto g = toy::collapsed_plan(11);
  io::write_graphml(g, dir.path() / "p.graphml");
  CHECK(io::read_graphml(dir.path() / "p.graphml") == g);
}

TEST_CASE("confidence 0.734 survives") {
  ProcessGraph g;
  g.stage = Stage::kStitched;
  g.canvas = {100, 100};
  Node n;
  n.id = "a";
  n.cls = NodeClass::kPump;
  n.box = {1, 2, 30, 40};
  n.confidence = 0.734;
  g.nodes.push_back(n);
  const auto back = io::parse_graphml(io::to_graphml(g));
  CHECK(std::abs(back.nodes[0].confidence - 0.734) < 1e-6);
}

TEST_CASE("writing an invalid graph is refused with its violations") {
  oracle::TempDir dir("annot");
  auto g = toy::collapsed_plan(1);
  Edge e;
  e.id = "dangling";
  e.source = g.nodes[0].id;
  e.target = "n99";
  g.edges.push_back(e);
  try {
    io::write_graphml(g, dir.path() / "bad.graphml");
    FAIL("expected InvalidGraphError");
  } catch (const io::InvalidGraphError& err) {
    REQUIRE(err.violations.size() == 1);
    CHECK(err.violations[0].subject == "dangling");
  }
  CHECK(!std::filesystem::exists(dir.path() / "bad.graphml"));
}

TEST_CASE("round trip is lossless for random valid graphs") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto g = oracle::random_stitched(rng);
    // Awkward doubles and routes exercise the number formatting.
    for (auto& n : g.nodes) n.box.x1 += std::uniform_real_distribution<double>(0, 1)(rng) / 3.0;
    for (auto& e : g.edges) e.route = {{0.1, 0.2}, {1e-7, 0.2}, {1e-7, 1234.5678901234}};
    if (!g.nodes.empty()) g.nodes[0].template_id = "valve_bowtie";
    CHECK(io::parse_graphml(io::to_graphml(g)) == g);
  }
}

TEST_CASE("manifest lines round-trip and append") {
  oracle::TempDir dir("manifest");
  io::ManifestEntry e{"a.png", "a.graphml", "seed0", "00000000000000ff", "0123456789abcdef", 42,
                      "2026-01-01T00:00:00Z"};
  CHECK(io::parse_manifest_line(io::manifest_line(e)) == e);
  io::append_manifest(dir.path() / "manifest.jsonl", e);
  e.attempt = 43;
  io::append_manifest(dir.path() / "manifest.jsonl", e);
  const auto all = io::read_manifest(dir.path() / "manifest.jsonl");
  REQUIRE(all.size() == 2);
  CHECK(all[1].attempt == 43);
  CHECK_THROWS_AS(io::parse_manifest_line("{\"image\": 3}"), DataError);
}

namespace {

std::vector<std::string> ids(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("plan" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("12 ids in 5 folds") {
  const auto splits = io::make_folds(ids(12), 5, {0});
  REQUIRE(splits.size() == 1);
  std::vector<std::size_t> sizes;
  for (const auto& f : splits[0].folds) sizes.push_back(f.test.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{2, 2, 2, 3, 3});
}

TEST_CASE("K equal to the id count is leave-one-out") {
  const auto splits = io::make_folds(ids(7), 7, {3});
  for (const auto& f : splits[0].folds) {
    CHECK(f.test.size() == 1);
    CHECK(f.train.size() == 6);
  }
}

TEST_CASE("folds are deterministic per seed and differ across seeds") {
  CHECK(io::make_folds(ids(20), 5, {1, 2}) == io::make_folds(ids(20), 5, {1, 2}));
  const auto s = io::make_folds(ids(20), 5, {1, 2});
  CHECK(s[0].folds != s[1].folds);
}

TEST_CASE("folds partition the ids") {
  const auto all = ids(23);
  const std::set<std::string> universe(all.begin(), all.end());
  for (const auto& split : io::make_folds(all, 5, {0, 1, 2})) {
    std::multiset<std::string> tests;
    for (const auto& f : split.folds) {
      tests.insert(f.test.begin(), f.test.end());
      std::set<std::string> both(f.train.begin(), f.train.end());
      both.insert(f.test.begin(), f.test.end());
      CHECK(both == universe);
      CHECK(f.train.size() + f.test.size() == all.size());
    }
    CHECK(std::set<std::string>(tests.begin(), tests.end()) == universe);
    CHECK(tests.size() == universe.size());
  }
}

TEST_CASE("fold argument errors") {
  CHECK_THROWS_AS(io::make_folds(ids(3), 4, {0}), std::invalid_argument);
  CHECK_THROWS_AS(io::make_folds(ids(3), 0, {0}), std::invalid_argument);
  CHECK_THROWS_AS(io::make_folds(ids(3), 2, {}), std::invalid_argument);
}

TEST_CASE("fold JSON round-trips") {
  const auto split = io::make_folds(ids(9), 3, {5})[0];
  CHECK(io::parse_fold_json(io::fold_json(split)) == split);
  const auto j = nlohmann::json::parse(io::fold_json(split));
  CHECK(j["k"] == 3);
  CHECK(j["seed"] == 5);
  CHECK(j.contains("schema_version"));
}

TEST_CASE("format_double is exact and short") {
  CHECK(io::format_double(0.734) == "0.734");
  CHECK(io::format_double(1500) == "1500");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
    CHECK(std::stod(io::format_double(v)) == v);
  }
}
