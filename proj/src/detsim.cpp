#include "pidforge/detsim.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace pidforge::detsim {

NoiseConfig NoiseConfig::at_level(double level, std::uint64_t seed) {
  NoiseConfig c;
  c.sigma = 20.0 * level;
  c.lambda_fp = 10.0 * level;
  c.p_drop = c.p_cls = c.p_edrop = c.p_eflip = 0.5 * level;
  c.seed = seed;
  return c;
}

NoiseConfig NoiseConfig::preset(const std::string& name, std::uint64_t seed) {
  if (name == "zero") return at_level(0.0, seed);
  if (name == "low") return at_level(0.1, seed);
  if (name == "med") return at_level(0.2, seed);
  if (name == "high") return at_level(0.3, seed);
  throw std::invalid_argument("unknown noise preset '" + name + "' (zero|low|med|high)");
}

void check(const NoiseConfig& c) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(c.p_drop) || !prob(c.p_cls) || !prob(c.p_edrop) || !prob(c.p_eflip)) {
    throw std::invalid_argument("noise probabilities must lie in [0, 1]");
  }
  if (!(c.sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (!(c.lambda_fp >= 0.0)) throw std::invalid_argument("lambda_fp must be >= 0");
  if (!(c.tp_conf_lo <= c.tp_conf_hi && c.fp_conf_lo <= c.fp_conf_hi && prob(c.tp_conf_lo) &&
        prob(c.tp_conf_hi) && prob(c.fp_conf_lo) && prob(c.fp_conf_hi))) {
    throw std::invalid_argument("confidence ranges must be ordered within [0, 1]");
  }
}

namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

BBox jitter(const BBox& b, double sigma, const Canvas& canvas, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  double x1 = b.x1 + noise(rng), y1 = b.y1 + noise(rng);
  double x2 = b.x2 + noise(rng), y2 = b.y2 + noise(rng);
  if (x1 > x2) std::swap(x1, x2);
  if (y1 > y2) std::swap(y1, y2);
  if (canvas.width > 0) {
    x1 = std::clamp(x1, 0.0, canvas.width - 1.0);
    x2 = std::clamp(x2, x1 + 1.0, static_cast<double>(canvas.width));
  } else {
    x2 = std::max(x2, x1 + 1.0);
  }
  if (canvas.height > 0) {
    y1 = std::clamp(y1, 0.0, canvas.height - 1.0);
    y2 = std::clamp(y2, y1 + 1.0, static_cast<double>(canvas.height));
  } else {
    y2 = std::max(y2, y1 + 1.0);
  }
  return {x1, y1, x2, y2};
}

NodeClass other_class(NodeClass c, Rng& rng) {
  std::vector<NodeClass> others;
  for (NodeClass k : kPhysicalClasses) {
    if (k != c) others.push_back(k);
  }
  std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
  return others[pick(rng)];
}

}  // namespace

ProcessGraph corrupt(const ProcessGraph& gt, const NoiseConfig& cfg) {
  check(cfg);
  Rng rng = make_rng(cfg.seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> tp_conf(cfg.tp_conf_lo, cfg.tp_conf_hi);
  std::uniform_real_distribution<double> fp_conf(cfg.fp_conf_lo, cfg.fp_conf_hi);

  ProcessGraph out;
  out.canvas = gt.canvas;
  out.stage = gt.stage;
  std::unordered_set<std::string> alive;
  for (const Node& n : gt.nodes) {
    if (unit(rng) < cfg.p_drop) continue;
    Node p = n;
    if (cfg.sigma > 0.0) p.box = jitter(n.box, cfg.sigma, gt.canvas, rng);
    if (is_physical(n.cls) && unit(rng) < cfg.p_cls) p.cls = other_class(n.cls, rng);
    p.confidence = tp_conf(rng);
    alive.insert(p.id);
    out.nodes.push_back(std::move(p));
  }

  if (cfg.lambda_fp > 0.0) {
    std::poisson_distribution<int> count(cfg.lambda_fp);
    std::uniform_int_distribution<std::size_t> cls(0, kPhysicalClasses.size() - 1);
    std::uniform_real_distribution<double> side(20.0, 80.0);
    const int k = count(rng);
    const double w = gt.canvas.width > 0 ? gt.canvas.width : 1000.0;
    const double h = gt.canvas.height > 0 ? gt.canvas.height : 1000.0;
    for (int i = 0; i < k; ++i) {
      Node f;
      f.id = "fp:" + std::to_string(i);
      f.cls = kPhysicalClasses[cls(rng)];
      const double bw = std::min(side(rng), w), bh = std::min(side(rng), h);
      const double x = std::uniform_real_distribution<double>(0.0, w - bw)(rng);
      const double y = std::uniform_real_distribution<double>(0.0, h - bh)(rng);
      f.box = {x, y, x + bw, y + bh};
      f.confidence = fp_conf(rng);
      out.nodes.push_back(std::move(f));
    }
  }

  for (const Edge& e : gt.edges) {
    if (!alive.count(e.source) || !alive.count(e.target)) continue;
    if (unit(rng) < cfg.p_edrop) continue;
    Edge p = e;
    if (unit(rng) < cfg.p_eflip) {
      p.cls = e.cls == EdgeClass::kSolid ? EdgeClass::kNonSolid : EdgeClass::kSolid;
    }
    p.confidence = tp_conf(rng);
    out.edges.push_back(std::move(p));
  }
  return out;
}

std::vector<ProcessGraph> corrupt_patches(const std::vector<ProcessGraph>& patches,
                                          const NoiseConfig& cfg) {
  check(cfg);
  std::vector<ProcessGraph> out(patches.size());
  const auto n = static_cast<std::ptrdiff_t>(patches.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    NoiseConfig c = cfg;
    // Distinct, reproducible stream per patch.
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                      static_cast<std::uint32_t>(cfg.seed >> 32), static_cast<std::uint32_t>(i),
                      0x9e3779b9u};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    c.seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    out[i] = corrupt(patches[i], c);
  }
  return out;
}

}  // namespace pidforge::detsim
