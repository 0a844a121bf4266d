#include "pidforge/generator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <optional>
#include <stdexcept>

#include "pidforge/geometry.hpp"

namespace pidforge::gen {

void check(const GenConfig& cfg) {
  if (!(cfg.delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (cfg.grid_cell < 1) throw std::invalid_argument("grid cell must be >= 1");
  if (cfg.max_retries < 0) throw std::invalid_argument("max retries must be >= 0");
  if (cfg.margin < 0) throw std::invalid_argument("margin must be >= 0");
}

PerturbResult perturb_layout(const ProcessGraph& seed, const GenConfig& cfg, Rng& rng) {
  check(cfg);
  if (seed.stage != Stage::kCollapsed) {
    throw DataError("perturb_layout expects a collapsed seed graph");
  }
  PerturbResult out{seed, 0};
  auto& nodes = out.graph.nodes;
  const double w = seed.canvas.width, h = seed.canvas.height;
  std::uniform_real_distribution<double> offset(-cfg.delta, cfg.delta);

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const BBox orig = nodes[i].box;
    // Nodes already inside the margin band may not move further into it.
    const double m = cfg.margin;
    const BBox allowed{std::min(m, orig.x1), std::min(m, orig.y1),
                       w - std::min(m, std::max(0.0, w - orig.x2)),
                       h - std::min(m, std::max(0.0, h - orig.y2))};
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_retries && !placed; ++attempt) {
      const double dx = std::round(offset(rng));
      const double dy = std::round(offset(rng));
      const BBox moved = orig.translated(dx, dy);
      if (moved.x1 < allowed.x1 || moved.y1 < allowed.y1 || moved.x2 > allowed.x2 ||
          moved.y2 > allowed.y2) {
        continue;
      }
      bool overlaps = false;
      for (std::size_t j = 0; j < nodes.size() && !overlaps; ++j) {
        overlaps = j != i && geometry::intersection_area(moved, nodes[j].box) > 0.0;
      }
      if (overlaps) continue;
      nodes[i].box = moved;
      placed = true;
    }
    if (!placed) ++out.fallbacks;
  }
  return out;
}

ProcessGraph substitute_symbols(const ProcessGraph& g, const SymbolLibrary& lib, Rng& rng) {
  for (const Node& n : g.nodes) {
    if (lib.of(n.cls).empty()) {
      throw std::invalid_argument("symbol library has no template for class '" +
                                  std::string(to_string(n.cls)) + "'");
    }
  }
  ProcessGraph out = g;
  const double cw = g.canvas.width, ch = g.canvas.height;
  for (Node& n : out.nodes) {
    const auto& choices = lib.of(n.cls);
    std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
    const SymbolTemplate& t = *choices[pick(rng)];
    n.template_id = t.id;
    const Point c = n.box.center();
    double x1 = std::round(c.x - t.width / 2.0);
    double y1 = std::round(c.y - t.height / 2.0);
    if (cw > 0) x1 = std::clamp(x1, 0.0, std::max(0.0, cw - t.width));
    if (ch > 0) y1 = std::clamp(y1, 0.0, std::max(0.0, ch - t.height));
    n.box = {x1, y1, x1 + t.width, y1 + t.height};
  }
  return out;
}

RenderedPlan generate_plan(const ProcessGraph& seed, const SymbolLibrary& lib,
                           const GenConfig& cfg, Rng& rng) {
  RenderedPlan plan;
  plan.graph = perturb_layout(seed, cfg, rng).graph;
  plan.graph = substitute_symbols(plan.graph, lib, rng);
  plan.routes = route_edges(plan.graph, cfg);
  plan.image = render(plan.graph, lib, cfg);
  return plan;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

struct Attempt {
  RenderedPlan plan;
  dedup::WlHash wl;
  dedup::PHash ph;
  std::optional<std::string> error;
};

Rng attempt_rng(std::uint64_t seed, std::int64_t attempt) {
  const auto a = static_cast<std::uint64_t>(attempt);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)};
  return Rng(seq);
}

std::string attempt_id(const std::string& seed_name, std::int64_t attempt) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06lld", static_cast<long long>(attempt));
  return seed_name + buf;
}

}  // namespace

CorpusReport generate_corpus(const std::vector<NamedGraph>& seeds, const GenConfig& cfg,
                             dedup::Registry& registry, const CorpusOptions& opts,
                             const SymbolLibrary& lib) {
  check(cfg);
  if (seeds.empty()) throw std::invalid_argument("generate_corpus needs at least one seed");
  for (const auto& s : seeds) {
    if (s.graph.stage != Stage::kCollapsed) {
      throw DataError("seed " + s.name + " is not a collapsed graph");
    }
  }
  CorpusReport report;
  const auto clock = opts.clock ? opts.clock : utc_now;
  const int batch = std::max(1, opts.batch);
  const bool to_disk = !opts.out_dir.empty();
  if (to_disk) std::filesystem::create_directories(opts.out_dir);

  int next = 0;
  while (next < opts.attempts_cap && static_cast<int>(report.manifest.size()) < opts.target) {
    const int count = std::min(batch, opts.attempts_cap - next);
    std::vector<Attempt> results(count);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) {
      const std::int64_t attempt = opts.first_attempt + next + k;
      const NamedGraph& seed = seeds[static_cast<std::size_t>(attempt) % seeds.size()];
      try {
        Rng rng = attempt_rng(cfg.rng_seed, attempt);
        results[k].plan = generate_plan(seed.graph, lib, cfg, rng);
        results[k].wl = dedup::wl_hash(results[k].plan.graph, registry.wl_options());
        results[k].ph = dedup::phash(results[k].plan.image);
      } catch (const std::exception& ex) {
        results[k].error = ex.what();
      }
    }
    for (int k = 0; k < count; ++k) {
      if (static_cast<int>(report.manifest.size()) >= opts.target) break;
      ++report.attempts;
      Attempt& a = results[k];
      if (a.error) throw std::runtime_error("generation attempt failed: " + *a.error);
      const std::int64_t attempt = opts.first_attempt + next + k;
      const NamedGraph& seed = seeds[static_cast<std::size_t>(attempt) % seeds.size()];
      const dedup::Decision d = registry.try_accept(a.wl, a.ph);
      if (d.verdict == dedup::Verdict::kRejectStructural) {
        ++report.rejected_structural;
        continue;
      }
      if (d.verdict == dedup::Verdict::kRejectVisual) {
        ++report.rejected_visual;
        continue;
      }
      const std::string id = attempt_id(seed.name, attempt);
      io::ManifestEntry entry{id + ".png", id + ".graphml", seed.name,
                              dedup::to_hex(a.wl.digest), dedup::to_hex(a.ph.bits),
                              attempt, clock()};
      if (to_disk) {
        write_png(a.plan.image, opts.out_dir / entry.image);
        io::write_graphml(a.plan.graph, opts.out_dir / entry.annotation);
        io::append_manifest(opts.out_dir / "manifest.jsonl", entry);
      } else {
        report.plans.push_back(std::move(a.plan));
      }
      report.manifest.push_back(std::move(entry));
    }
    next += count;
  }

  report.ok = !report.manifest.empty();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%zu accepted of %d attempts (%.1f%%); rejected: %d structural, %d visual",
                report.manifest.size(), report.attempts, 100.0 * report.acceptance_rate(),
                report.rejected_structural, report.rejected_visual);
  report.message = buf;
  if (!report.ok) report.message = "no plan accepted: " + report.message;
  return report;
}

}  // namespace pidforge::gen
