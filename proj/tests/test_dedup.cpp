#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pidforge/dedup.hpp"
#include "pidforge/generator.hpp"
#include "pidforge/toy.hpp"

using namespace pidforge;
using namespace pidforge::dedup;

namespace {

ProcessGraph triangle(const std::array<std::string, 3>& ids) {
  ProcessGraph g;
  g.stage = Stage::kCollapsed;
  const NodeClass cls[3] = {NodeClass::kValve, NodeClass::kPump, NodeClass::kTank};
  for (int i = 0; i < 3; ++i) {
    Node n;
    n.id = ids[i];
    n.cls = cls[i];
    n.box = {i * 100.0, 0, i * 100.0 + 20, 20};
    g.nodes.push_back(n);
  }
  for (int i = 0; i < 3; ++i) {
    Edge e;
    e.id = "e" + std::to_string(i);
    e.source = ids[i];
    e.target = ids[(i + 1) % 3];
    g.edges.push_back(e);
  }
  return g;
}

Image checker(int w, int h, int cell) {
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = ((x / cell + y / cell) % 2) ? 230 : 20;
  }
  return img;
}

}  // namespace

TEST_CASE("WL examples") {
  CHECK(wl_hash(triangle({"a", "b", "c"})) == wl_hash(triangle({"z", "q", "m"})));

  auto relabeled = triangle({"a", "b", "c"});
  relabeled.nodes[0].cls = NodeClass::kPump;
  CHECK(wl_hash(relabeled) != wl_hash(triangle({"a", "b", "c"})));

  auto path = triangle({"a", "b", "c"});
  path.edges.pop_back();  // a-b, b-c
  auto star = path;
  star.edges[1].source = "a";  // a-b, a-c
  star.edges[1].target = "c";
  CHECK(wl_hash(path) != wl_hash(star));
  CHECK(wl_hash(path).iterations == 3);
}

TEST_CASE("WL depends on edge classes but never on ids") {
  auto g = triangle({"a", "b", "c"});
  auto h = g;
  h.edges[0].cls = EdgeClass::kNonSolid;
  CHECK(wl_hash(g) != wl_hash(h));
}

TEST_CASE("WL is invariant under id permutation on toy plans") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = toy::collapsed_plan(seed, toy::small_options(seed));
    const auto p = oracle::permuted(g, rng);
    CHECK(wl_hash(g) == wl_hash(p));
    CHECK(wl_hash(g, {3, true, 250}) == wl_hash(p, {3, true, 250}));
  }
}

TEST_CASE("layout-aware labels separate moves across a cell") {
  auto g = toy::collapsed_plan(5);
  const WlOptions layout{3, true, 250.0};
  const auto before = wl_hash(g, layout);
  g.nodes[0].box = g.nodes[0].box.translated(260, 0);
  CHECK(wl_hash(g, layout) != before);
  CHECK(wl_hash(g) == wl_hash(toy::collapsed_plan(5)));
  auto t = toy::collapsed_plan(5);
  t.nodes[0].template_id = "something_else";
  CHECK(wl_hash(t, layout) != wl_hash(toy::collapsed_plan(5), layout));
}

TEST_CASE("pHash examples") {
  const auto& lib = gen::SymbolLibrary::builtin();
  gen::GenConfig cfg;
  std::mt19937_64 rng(8);
  const auto plan = gen::generate_plan(toy::collapsed_plan(100), lib, cfg, rng);
  const PHash a = phash(plan.image);
  CHECK(hamming(a, a) == 0);
  CHECK((a.bits >> 63) == 0);

  Image noisy = plan.image;
  std::mt19937_64 flip(1);
  const std::size_t n = noisy.pixels.size() / 100;
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = noisy.pixels[std::uniform_int_distribution<std::size_t>(0, noisy.pixels.size() - 1)(flip)];
    p = static_cast<std::uint8_t>(255 - p);
  }
  CHECK(hamming(a, phash(noisy)) <= 10);

  // Constant images have no AC energy: every coefficient ties the median.
  CHECK(hamming(phash(Image(64, 64, 255)), phash(Image(64, 64, 0))) <= 2);
  CHECK_THROWS_AS(phash(Image(31, 64)), std::invalid_argument);
}

TEST_CASE("pHash distance is a bounded symmetric metric") {
  std::vector<PHash> hs;
  for (int cell : {2, 3, 5, 8, 13, 40}) hs.push_back(phash(checker(200, 150, cell)));
  for (const auto& a : hs) {
    for (const auto& b : hs) {
      CHECK(hamming(a, b) == hamming(b, a));
      CHECK(hamming(a, b) <= 64);
      CHECK(hamming(a, b) >= 0);
    }
    CHECK(hamming(a, a) == 0);
  }
}

TEST_CASE("hex helpers") {
  CHECK(to_hex(0xff) == "00000000000000ff");
  CHECK(from_hex("00000000000000ff") == 0xff);
  CHECK(from_hex(to_hex(0xdeadbeefcafef00dULL)) == 0xdeadbeefcafef00dULL);
}

TEST_CASE("registry examples") {
  Registry reg(10, {3, false, 250});
  const auto g = toy::collapsed_plan(1);
  const Image img = checker(64, 64, 8);
  CHECK(reg.try_accept(g, img).verdict == Verdict::kAccept);
  CHECK(reg.try_accept(g, img).verdict == Verdict::kRejectStructural);

  // Re-rendered with a different layout: class-only labels still match.
  auto moved = g;
  for (auto& n : moved.nodes) n.box = n.box.translated(30, 0);
  CHECK(reg.try_accept(moved, checker(64, 64, 3)).verdict == Verdict::kRejectStructural);
}

TEST_CASE("registry rejects near images and records accepted ones") {
  Registry reg(10);
  const Image img = checker(64, 64, 8);
  CHECK(reg.try_accept(WlHash{1, 3}, phash(img)).verdict == Verdict::kAccept);
  const auto d = reg.try_accept(WlHash{2, 3}, phash(img));
  CHECK(d.verdict == Verdict::kRejectVisual);
  CHECK(d.min_distance == 0);
  CHECK(reg.size() == 1);
  CHECK(!reg.contains(2));
  PHash far{phash(img).bits ^ 0x3ffULL};
  CHECK(reg.try_accept(WlHash{3, 3}, far).verdict == Verdict::kAccept);
  CHECK(reg.size() == 2);
}

TEST_CASE("structural rejection is permanent") {
  Registry reg(10);
  reg.record(WlHash{42, 3}, PHash{0});
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    CHECK(reg.try_accept(WlHash{42, 3}, PHash{rng() >> 1}).verdict == Verdict::kRejectStructural);
    reg.try_accept(WlHash{rng(), 3}, PHash{rng() >> 1});
  }
}
