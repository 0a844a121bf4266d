#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "pidforge/annot_io.hpp"
#include "pidforge/cli.hpp"
#include "pidforge/graph.hpp"
#include "pidforge/stats.hpp"

using namespace pidforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "pidforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string kData = PIDFORGE_DATA_DIR;

ProcessGraph triangle() {
  ProcessGraph g;
  g.stage = Stage::kCollapsed;
  g.canvas = {500, 500};
  for (int i = 0; i < 3; ++i) {
    Node n;
    n.id = "n" + std::to_string(i);
    n.cls = NodeClass::kValve;
    n.box = {i * 100.0, 0, i * 100.0 + 20, 20};
    g.nodes.push_back(n);
  }
  for (int i = 0; i < 3; ++i) {
    Edge e;
    e.id = "e" + std::to_string(i);
    e.source = "n" + std::to_string(i);
    e.target = "n" + std::to_string((i + 1) % 3);
    g.edges.push_back(e);
  }
  return g;
}

}  // namespace

TEST_CASE("collapse of the toy raw plan") {
  oracle::TempDir tmp("cli_collapse");
  const auto out = tmp.path() / "collapsed.graphml";
  const auto r = run({"collapse", kData + "/toy_plan_raw.graphml", out.string()});
  REQUIRE(r.code == 0);
  const auto g = io::read_graphml(out);
  CHECK(g.stage == Stage::kCollapsed);
  CHECK(validate(g).empty());
  for (const auto& n : g.nodes) CHECK(is_physical(n.cls));

  const auto bridged = tmp.path() / "bridged.graphml";
  CHECK(run({"collapse", kData + "/toy_plan_raw.graphml", bridged.string(), "--crossing", "bridge"}).code == 0);
  CHECK(io::read_graphml(bridged).edges.size() >= g.edges.size());
}

TEST_CASE("stats examples") {
  oracle::TempDir tmp("cli_stats");
  fs::create_directories(tmp.path() / "tri");
  io::write_graphml(triangle(), tmp.path() / "tri" / "t.graphml");
  auto r = run({"stats", (tmp.path() / "tri").string()});
  CHECK(r.code == 0);
  CHECK(r.out == "count=1 nodes=3±0 edges=3±0\n");

  fs::create_directories(tmp.path() / "empty");
  r = run({"stats", (tmp.path() / "empty").string()});
  CHECK(r.code == 0);
  CHECK(r.out == "count=0 nodes=- edges=-\n");

  const auto csv = tmp.path() / "plans.csv";
  r = run({"stats", kData + "/seeds", "--csv", csv.string()});
  CHECK(r.code == 0);
  CHECK(r.out == stats::summary_line(stats::stats_report(kData + "/seeds")) + "\n");
  std::ifstream f(csv);
  int lines = 0;
  for (std::string line; std::getline(f, line);) ++lines;
  CHECK(lines == 1 + 3);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"collapse"}).code == cli::kExitUsage);
  CHECK(run({"folds", "--out", "x"}).code == cli::kExitUsage);
  CHECK(run({"collapse", "a", "b", "--crossing", "sideways"}).code == cli::kExitUsage);
  const auto h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("collapse") != std::string::npos);
}

TEST_CASE("data errors exit 2") {
  oracle::TempDir tmp("cli_data");
  const auto bad = tmp.path() / "bad.graphml";
  std::ofstream(bad) << "<graphml><graph><node id=\"a\"></graph>";
  auto r = run({"collapse", bad.string(), (tmp.path() / "o.graphml").string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("level=error") != std::string::npos);
  r = run({"collapse", (tmp.path() / "missing.graphml").string(), (tmp.path() / "o.graphml").string()});
  CHECK(r.code == cli::kExitData);
  r = run({"stats", (tmp.path() / "nowhere").string()});
  CHECK(r.code == cli::kExitData);
  // A collapsed plan is not valid collapse input.
  r = run({"collapse", kData + "/seeds/toy_seed_0.graphml", (tmp.path() / "o.graphml").string()});
  CHECK(r.code == cli::kExitData);
}

TEST_CASE("folds over the seed plans") {
  oracle::TempDir tmp("cli_folds");
  const auto r = run({"folds", "--plans", kData + "/seeds", "--k", "3", "--seeds", "0,1", "--out",
                      tmp.path().string()});
  REQUIRE(r.code == 0);
  for (int s : {0, 1}) {
    const auto split = io::parse_fold_json(io::read_text(tmp.path() / ("folds_seed" + std::to_string(s) + ".json")));
    CHECK(split.k == 3);
    REQUIRE(split.folds.size() == 3);
    for (const auto& f : split.folds) {
      CHECK(f.test.size() == 1);
      CHECK(f.train.size() == 2);
    }
  }
}

TEST_CASE("command-line flags override config file values") {
  oracle::TempDir tmp("cli_config");
  const auto ini = tmp.path() / "pidforge.ini";
  std::ofstream(ini) << "[folds]\nk=2\n";
  const auto from_config = tmp.path() / "a";
  CHECK(run({"--config", ini.string(), "folds", "--plans", kData + "/seeds", "--out", from_config.string()}).code == 0);
  CHECK(io::parse_fold_json(io::read_text(from_config / "folds_seed0.json")).k == 2);

  const auto from_flag = tmp.path() / "b";
  CHECK(run({"--config", ini.string(), "folds", "--plans", kData + "/seeds", "--k", "3", "--out",
             from_flag.string()})
            .code == 0);
  CHECK(io::parse_fold_json(io::read_text(from_flag / "folds_seed0.json")).k == 3);
}

TEST_CASE("pipeline through the executable") {
  oracle::TempDir tmp("cli_pipeline");
  const std::string exe = PIDFORGE_EXE;
  const auto p = tmp.path().string();
  auto sh = [&](const std::string& args) {
    const int status = std::system((exe + " -q " + args + " 2>>" + p + "/log.txt").c_str());
    return WEXITSTATUS(status);
  };
  REQUIRE(sh("patch --plan " + kData + "/seeds/toy_seed_0.graphml --out " + p + "/gt") == 0);
  REQUIRE(sh("detsim --gt-patches " + p + "/gt/toy_seed_0 --noise-preset zero --out " + p + "/pred") == 0);
  REQUIRE(sh("stitch --windows " + p + "/gt/toy_seed_0/windows.json --patches " + p + "/pred --out " + p +
             "/s.graphml") == 0);
  REQUIRE(sh("eval --pred " + p + "/s.graphml --gt " + kData + "/seeds/toy_seed_0.graphml --report " + p +
             "/r.json") == 0);
  const auto j = nlohmann::json::parse(io::read_text(tmp.path() / "r.json"));
  CHECK(j["summary"]["node_map"] == 1.0);
  CHECK(j["summary"]["edge_map"].get<double>() >= 0.99);
  CHECK(sh("nonsense") == cli::kExitUsage);
}
