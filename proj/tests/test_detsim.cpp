#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pidforge/detsim.hpp"
#include "pidforge/metrics.hpp"
#include "pidforge/patcher.hpp"
#include "pidforge/toy.hpp"

using namespace pidforge;
using namespace pidforge::detsim;

TEST_CASE("levels and presets") {
  const auto z = NoiseConfig::at_level(0.0);
  CHECK(z.sigma == 0.0);
  CHECK(z.p_drop == 0.0);
  CHECK(z.lambda_fp == 0.0);
  const auto m = NoiseConfig::preset("med", 4);
  CHECK(m.sigma == doctest::Approx(4.0));
  CHECK(m.lambda_fp == doctest::Approx(2.0));
  CHECK(m.p_drop == doctest::Approx(0.1));
  CHECK(m.p_eflip == doctest::Approx(0.1));
  CHECK(m.seed == 4);
  CHECK(NoiseConfig::preset("low").sigma < NoiseConfig::preset("high").sigma);
  CHECK(NoiseConfig::preset("zero").p_cls == 0.0);
  CHECK_THROWS_AS(NoiseConfig::preset("extreme"), std::invalid_argument);

  NoiseConfig bad;
  bad.p_drop = 1.5;
  CHECK_THROWS_AS(check(bad), std::invalid_argument);
  bad = NoiseConfig{};
  bad.sigma = -1;
  CHECK_THROWS_AS(check(bad), std::invalid_argument);
  bad = NoiseConfig{};
  bad.tp_conf_lo = 0.9;
  bad.tp_conf_hi = 0.2;
  CHECK_THROWS_AS(check(bad), std::invalid_argument);
  CHECK_NOTHROW(check(NoiseConfig::at_level(2.0)));  // probabilities stay at 1
}

TEST_CASE("zero noise is the identity up to confidence") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto gt = toy::collapsed_plan(seed);
    const auto p = corrupt(gt, NoiseConfig::at_level(0.0, seed));
    REQUIRE(p.nodes.size() == gt.nodes.size());
    REQUIRE(p.edges.size() == gt.edges.size());
    for (std::size_t i = 0; i < gt.nodes.size(); ++i) {
      CHECK(p.nodes[i].id == gt.nodes[i].id);
      CHECK(p.nodes[i].cls == gt.nodes[i].cls);
      CHECK(p.nodes[i].box == gt.nodes[i].box);
      CHECK(p.nodes[i].confidence >= 0.6);
      CHECK(p.nodes[i].confidence <= 1.0);
    }
    CHECK(oracle::edge_set(p) == oracle::edge_set(gt));
    for (const auto& e : p.edges) {
      CHECK(e.confidence >= 0.6);
      CHECK(e.confidence <= 1.0);
    }
    const auto r = metrics::evaluate_plan(p, gt);
    CHECK(r.nodes.mean == 1.0);
    CHECK(r.edges.mean == 1.0);
  }
}

TEST_CASE("dropping every node leaves only spurious ones") {
  const auto gt = toy::collapsed_plan(1);
  NoiseConfig cfg;
  cfg.p_drop = 1.0;
  auto p = corrupt(gt, cfg);
  CHECK(p.nodes.empty());
  CHECK(p.edges.empty());

  cfg.lambda_fp = 5.0;
  int total = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    cfg.seed = s;
    p = corrupt(gt, cfg);
    CHECK(p.edges.empty());
    for (const auto& n : p.nodes) {
      CHECK(n.id.rfind("fp:", 0) == 0);
      CHECK(n.confidence >= 0.05);
      CHECK(n.confidence <= 0.6);
      CHECK(is_physical(n.cls));
      CHECK(n.box.x1 >= 0.0);
      CHECK(n.box.y1 >= 0.0);
      CHECK(n.box.x2 <= gt.canvas.width);
      CHECK(n.box.y2 <= gt.canvas.height);
    }
    total += static_cast<int>(p.nodes.size());
  }
  CHECK(total / 200.0 == doctest::Approx(5.0).epsilon(0.15));
}

TEST_CASE("jitter stays inside the Gaussian tail bound") {
  const auto gt = toy::collapsed_plan(2);
  NoiseConfig cfg;
  cfg.sigma = 3.0;
  const double bound = 4.0 * cfg.sigma;
  int samples = 0, outside = 0;
  double sum_sq = 0.0;
  std::uint64_t seed = 0;
  while (samples < 10000) {
    cfg.seed = seed++;
    const auto p = corrupt(gt, cfg);
    CHECK(oracle::edge_set(p) == oracle::edge_set(gt));
    REQUIRE(p.nodes.size() == gt.nodes.size());
    for (std::size_t i = 0; i < gt.nodes.size() && samples < 10000; ++i, ++samples) {
      const BBox& a = gt.nodes[i].box;
      const BBox& b = p.nodes[i].box;
      for (double d : {b.x1 - a.x1, b.y1 - a.y1, b.x2 - a.x2, b.y2 - a.y2}) {
        outside += std::abs(d) > bound;
        CHECK(std::abs(d) <= 6.0 * cfg.sigma);
        sum_sq += d * d;
      }
    }
  }
  // Two-sided 4-sigma mass is 6.3e-5; 4e4 coordinates expect about 2.5.
  CHECK(outside <= 12);
  CHECK(std::sqrt(sum_sq / (4.0 * samples)) == doctest::Approx(cfg.sigma).epsilon(0.05));
}

TEST_CASE("class flips pick another physical class and spare border nodes") {
  const auto gt = toy::collapsed_plan(3);
  NoiseConfig cfg;
  cfg.p_cls = 1.0;
  cfg.p_eflip = 1.0;
  const auto p = corrupt(gt, cfg);
  REQUIRE(p.nodes.size() == gt.nodes.size());
  for (std::size_t i = 0; i < gt.nodes.size(); ++i) {
    CHECK(p.nodes[i].cls != gt.nodes[i].cls);
    CHECK(is_physical(p.nodes[i].cls));
  }
  for (std::size_t i = 0; i < gt.edges.size(); ++i) CHECK(p.edges[i].cls != gt.edges[i].cls);

  const auto set = patch::patch_plan(gt, nullptr, patch::PatchSpec{});
  int borders = 0;
  for (const auto& patch : set.patches) {
    const auto q = corrupt(patch.graph, cfg);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      if (patch.graph.nodes[i].cls == NodeClass::kBorder) {
        CHECK(q.nodes[i].cls == NodeClass::kBorder);
        ++borders;
      }
    }
  }
  CHECK(borders > 0);
}

TEST_CASE("corruption is deterministic per seed") {
  const auto gt = toy::collapsed_plan(4);
  const auto cfg = NoiseConfig::preset("high", 17);
  const auto a = corrupt(gt, cfg);
  const auto b = corrupt(gt, cfg);
  CHECK(a == b);
  auto other = cfg;
  other.seed = 18;
  CHECK(corrupt(gt, other) != a);
}

TEST_CASE("per-patch corruption uses distinct reproducible streams") {
  const auto gt = toy::collapsed_plan(5);
  const auto set = patch::patch_plan(gt, nullptr, patch::PatchSpec{});
  std::vector<ProcessGraph> graphs;
  for (const auto& p : set.patches) graphs.push_back(p.graph);
  const auto cfg = NoiseConfig::preset("low", 9);
  const auto a = corrupt_patches(graphs, cfg);
  CHECK(a == corrupt_patches(graphs, cfg));
  REQUIRE(a.size() == graphs.size());

  // Identical inputs in two slots still draw different noise.
  const std::vector<ProcessGraph> twins{gt, gt};
  const auto t = corrupt_patches(twins, cfg);
  CHECK(t[0] != t[1]);
}

TEST_CASE("higher noise scores lower on average") {
  double prev = 2.0;
  for (double level : {0.0, 0.1, 0.3}) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto gt = toy::collapsed_plan(seed);
      sum += metrics::evaluate_plan(corrupt(gt, NoiseConfig::at_level(level, seed)), gt).edges.mean;
    }
    CHECK(sum / 10.0 < prev);
    prev = sum / 10.0;
  }
}
