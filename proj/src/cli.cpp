#include "pidforge/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pidforge/annot_io.hpp"
#include "pidforge/detsim.hpp"
#include "pidforge/generator.hpp"
#include "pidforge/graph.hpp"
#include "pidforge/kernels.hpp"
#include "pidforge/metrics.hpp"
#include "pidforge/patcher.hpp"
#include "pidforge/stats.hpp"
#include "pidforge/stitcher.hpp"

namespace pidforge::cli {
namespace fs = std::filesystem;
namespace {

enum class Level { kDebug, kInfo, kWarn, kError };

class Log {
 public:
  Log(std::ostream& err, const std::string& cmd) : err_(err), cmd_(cmd) {}
  int verbosity = 0;  // -1 quiet, 0 normal, 1 debug

  void operator()(Level level, const std::string& event,
                  const std::vector<std::pair<std::string, std::string>>& fields = {}) const {
    if (level == Level::kDebug && verbosity < 1) return;
    if (level == Level::kInfo && verbosity < 0) return;
    static const char* names[] = {"debug", "info", "warn", "error"};
    err_ << "level=" << names[static_cast<int>(level)] << " cmd=" << cmd_
         << " event=" << event;
    for (const auto& [k, v] : fields) err_ << ' ' << k << '=' << quote(v);
    err_ << '\n';
  }
  void set_cmd(const std::string& cmd) { cmd_ = cmd; }

 private:
  static std::string quote(const std::string& v) {
    if (!v.empty() && v.find_first_of(" \"=\t\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
      if (c == '"' || c == '\\') out += '\\';
      out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
  }
  std::ostream& err_;
  std::string cmd_;
};

std::vector<fs::path> graphml_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".graphml") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

fs::path require_dir(const fs::path& p) {
  if (!fs::is_directory(p)) throw DataError("not a directory: " + p.string());
  return p;
}

// --- subcommand state ------------------------------------------------------

struct CollapseArgs {
  std::string input, output, crossing = "delete";
};

struct GenerateArgs {
  std::string seeds, out;
  gen::GenConfig cfg;
  gen::CorpusOptions opts;
  int tau = 10;
  bool resume = false;
};

struct PatchArgs {
  std::string plan, image, out, name;
  patch::PatchSpec spec;
};

struct StitchArgs {
  std::string patches, windows, out;
  stitch::StitchConfig cfg;
};

struct DetsimArgs {
  std::string gt_patches, out, preset = "low";
  std::optional<double> sigma, p_drop, lambda_fp, p_cls, p_edrop, p_eflip;
  std::uint64_t seed = 0;
};

struct EvalArgs {
  std::string pred, gt, report;
  metrics::EvalOptions opts;
};

struct StatsArgs {
  std::string corpus, csv, degree_csv;
};

struct FoldsArgs {
  std::string plans, manifest, out;
  int k = io::kDefaultFolds;
  std::vector<std::uint64_t> seeds{std::begin(io::kDefaultFoldSeeds),
                                   std::end(io::kDefaultFoldSeeds)};
};

// --- subcommands -----------------------------------------------------------

int do_collapse(const CollapseArgs& a, const Log& log) {
  CollapseOptions opts;
  if (a.crossing == "bridge") opts.crossing = CrossingMode::kBridge;
  const ProcessGraph raw = io::read_graphml(a.input);
  const CollapseResult r = collapse(raw, opts);
  for (const auto& w : r.warnings) log(Level::kWarn, "collapse_warning", {{"detail", w}});
  io::write_graphml(r.graph, a.output);
  log(Level::kInfo, "collapsed",
      {{"nodes", std::to_string(r.graph.nodes.size())},
       {"edges", std::to_string(r.graph.edges.size())},
       {"out", a.output}});
  return kExitOk;
}

int do_generate(GenerateArgs a, const Log& log) {
  gen::check(a.cfg);
  std::vector<gen::NamedGraph> seeds;
  for (const auto& f : graphml_files(require_dir(a.seeds))) {
    seeds.push_back({f.stem().string(), io::read_graphml(f)});
  }
  if (seeds.empty()) throw DataError("no .graphml seeds in " + a.seeds);
  dedup::Registry registry(a.tau);
  a.opts.out_dir = a.out;
  const fs::path manifest = fs::path(a.out) / "manifest.jsonl";
  if (fs::exists(manifest)) {
    if (!a.resume) {
      throw DataError(manifest.string() + " exists; pass --resume to continue that corpus");
    }
    const auto entries = io::read_manifest(manifest);
    for (const auto& e : entries) {
      registry.record({dedup::from_hex(e.wl_hash), registry.wl_options().iterations},
                      {dedup::from_hex(e.phash)});
      a.opts.first_attempt = std::max(a.opts.first_attempt, e.attempt + 1);
    }
    a.opts.target = std::max(0, a.opts.target - static_cast<int>(entries.size()));
    log(Level::kInfo, "resume", {{"accepted", std::to_string(entries.size())},
                                 {"next_attempt", std::to_string(a.opts.first_attempt)}});
  }
  const gen::CorpusReport r = gen::generate_corpus(seeds, a.cfg, registry, a.opts);
  const std::vector<std::pair<std::string, std::string>> tally{
      {"accepted", std::to_string(r.manifest.size())},
      {"attempts", std::to_string(r.attempts)},
      {"rejected_structural", std::to_string(r.rejected_structural)},
      {"rejected_visual", std::to_string(r.rejected_visual)}};
  if (!r.ok && a.opts.target > 0) {
    log(Level::kError, "no_acceptance", tally);
    return kExitData;
  }
  log(Level::kInfo, "generated", tally);
  return kExitOk;
}

int do_patch(const PatchArgs& a, const Log& log) {
  patch::check(a.spec);
  const ProcessGraph g = io::read_graphml(a.plan);
  std::optional<Image> img;
  if (!a.image.empty()) img = read_png(a.image);
  const std::string name = a.name.empty() ? fs::path(a.plan).stem().string() : a.name;
  const auto set = patch::patch_plan(g, img ? &*img : nullptr, a.spec, name);
  const auto index = patch::write_patch_set(set, a.out);
  std::size_t borders = 0;
  for (const auto& p : set.patches) borders += p.borders.size();
  log(Level::kInfo, "patched", {{"windows", std::to_string(set.patches.size())},
                                {"border_nodes", std::to_string(borders)},
                                {"index", index.string()}});
  return kExitOk;
}

int do_stitch(const StitchArgs& a, const Log& log) {
  stitch::check(a.cfg);
  const auto loaded = patch::read_patch_set(a.windows, a.patches);
  const ProcessGraph g = stitch::stitch(loaded.graphs, loaded.index, a.cfg);
  io::write_graphml(g, a.out);
  log(Level::kInfo, "stitched", {{"nodes", std::to_string(g.nodes.size())},
                                 {"edges", std::to_string(g.edges.size())},
                                 {"out", a.out}});
  return kExitOk;
}

int do_detsim(const DetsimArgs& a, const Log& log) {
  detsim::NoiseConfig cfg = detsim::NoiseConfig::preset(a.preset, a.seed);
  if (a.sigma) cfg.sigma = *a.sigma;
  if (a.p_drop) cfg.p_drop = *a.p_drop;
  if (a.lambda_fp) cfg.lambda_fp = *a.lambda_fp;
  if (a.p_cls) cfg.p_cls = *a.p_cls;
  if (a.p_edrop) cfg.p_edrop = *a.p_edrop;
  if (a.p_eflip) cfg.p_eflip = *a.p_eflip;
  detsim::check(cfg);
  // Either the index file itself or the directory holding it.
  const fs::path index_path = fs::is_directory(a.gt_patches)
                                  ? fs::path(a.gt_patches) / "windows.json"
                                  : fs::path(a.gt_patches);
  const auto loaded = patch::read_patch_set(index_path);
  const auto preds = detsim::corrupt_patches(loaded.graphs, cfg);
  fs::create_directories(a.out);
  patch::WindowIndex index = loaded.index;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    io::write_graphml(preds[i], fs::path(a.out) / index.windows[i].graphml);
    index.windows[i].png.clear();
  }
  io::write_text(fs::path(a.out) / "windows.json", patch::windows_json(index));
  log(Level::kInfo, "corrupted", {{"patches", std::to_string(preds.size())},
                                  {"preset", a.preset},
                                  {"out", a.out}});
  return kExitOk;
}

int do_eval(const EvalArgs& a, const Log& log, std::ostream& out) {
  std::vector<std::pair<fs::path, fs::path>> pairs;  // (pred, gt)
  if (fs::is_directory(a.gt)) {
    require_dir(a.pred);
    for (const auto& gt : graphml_files(a.gt)) pairs.emplace_back(fs::path(a.pred) / gt.filename(), gt);
  } else {
    pairs.emplace_back(a.pred, a.gt);
  }
  std::vector<metrics::EvalReport> reports;
  for (const auto& [pred_path, gt_path] : pairs) {
    const ProcessGraph gt = io::read_graphml(gt_path);
    ProcessGraph pred;
    if (fs::exists(pred_path)) {
      pred = io::read_graphml(pred_path);
    } else {
      log(Level::kWarn, "missing_prediction", {{"plan", gt_path.stem().string()}});
      pred.canvas = gt.canvas;
      pred.stage = Stage::kStitched;
    }
    auto r = metrics::evaluate_plan(pred, gt, a.opts);
    r.plan = gt_path.stem().string();
    for (const auto& w : r.warnings) log(Level::kWarn, "eval_warning", {{"plan", r.plan}, {"detail", w}});
    reports.push_back(std::move(r));
  }
  const std::string json = metrics::report_json(reports, a.opts);
  if (a.report.empty() || a.report == "-") {
    out << json;
  } else {
    io::write_text(a.report, json);
  }
  const auto agg = metrics::aggregate(reports);
  log(Level::kInfo, "evaluated", {{"plans", std::to_string(agg.plans)},
                                  {"node_map", io::format_double(agg.node_map)},
                                  {"edge_map", io::format_double(agg.edge_map)}});
  return kExitOk;
}

int do_stats(const StatsArgs& a, const Log& log, std::ostream& out) {
  const auto r = stats::stats_report(a.corpus);
  for (const auto& w : r.warnings) log(Level::kWarn, "stats_skip", {{"detail", w}});
  if (!a.csv.empty()) io::write_text(a.csv, stats::plans_csv(r));
  if (!a.degree_csv.empty()) io::write_text(a.degree_csv, stats::degree_csv(r));
  out << stats::summary_line(r) << '\n';
  return kExitOk;
}

int do_folds(const FoldsArgs& a, const Log& log) {
  std::vector<std::string> ids;
  if (!a.manifest.empty()) {
    for (const auto& e : io::read_manifest(a.manifest)) {
      ids.push_back(fs::path(e.annotation).stem().string());
    }
  } else {
    for (const auto& f : graphml_files(require_dir(a.plans))) ids.push_back(f.stem().string());
  }
  const auto splits = io::make_folds(ids, a.k, a.seeds);
  fs::create_directories(a.out);
  for (const auto& s : splits) {
    io::write_text(fs::path(a.out) / ("folds_seed" + std::to_string(s.seed) + ".json"),
                   io::fold_json(s));
  }
  log(Level::kInfo, "folds", {{"plans", std::to_string(ids.size())},
                              {"k", std::to_string(a.k)},
                              {"runs", std::to_string(a.k * splits.size())}});
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pidforge: P&ID graph pre-processing, synthesis, patching and evaluation",
               "pidforge"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with option defaults; flags take precedence");
  int jobs = 0;
  int verbose = 0;
  bool quiet = false;
  app.add_option("--jobs,-j", jobs, "Worker cap for parallel regions (0: runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose,-v", verbose, "Debug logging");
  app.add_flag("--quiet,-q", quiet, "Only warnings and errors");

  CollapseArgs ca;
  auto* collapse_cmd = app.add_subcommand("collapse", "Contract connector chains of a raw plan");
  collapse_cmd->add_option("input", ca.input, "Raw GraphML")->required();
  collapse_cmd->add_option("output", ca.output, "Collapsed GraphML")->required();
  collapse_cmd->add_option("--crossing", ca.crossing, "Crossing markers: delete or bridge")
      ->check(CLI::IsMember({"delete", "bridge"}))
      ->capture_default_str();

  GenerateArgs ga;
  auto* gen_cmd = app.add_subcommand("generate", "Synthesise a deduplicated corpus from seeds");
  gen_cmd->add_option("--seeds", ga.seeds, "Directory of collapsed seed GraphML")->required();
  gen_cmd->add_option("--out", ga.out, "Output directory")->required();
  gen_cmd->add_option("--target", ga.opts.target, "Plans to accept")->capture_default_str();
  gen_cmd->add_option("--attempts-cap", ga.opts.attempts_cap, "Maximum attempts")
      ->capture_default_str();
  gen_cmd->add_option("--batch", ga.opts.batch, "Attempts evaluated concurrently")
      ->capture_default_str();
  gen_cmd->add_option("--delta", ga.cfg.delta, "Max displacement per axis, px")
      ->capture_default_str();
  gen_cmd->add_option("--retries", ga.cfg.max_retries, "Placement retries per node")
      ->capture_default_str();
  gen_cmd->add_option("--grid-cell", ga.cfg.grid_cell, "Routing grid cell, px")
      ->capture_default_str();
  gen_cmd->add_option("--margin", ga.cfg.margin, "Canvas keep-out margin, px")
      ->capture_default_str();
  int background = ga.cfg.background;
  gen_cmd->add_option("--background", background, "Background grey level")
      ->check(CLI::Range(0, 255))
      ->capture_default_str();
  gen_cmd->add_option("--rng-seed", ga.cfg.rng_seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--tau", ga.tau, "Minimum pHash Hamming distance")->capture_default_str();
  gen_cmd->add_flag("--resume", ga.resume, "Continue an existing corpus in --out");

  PatchArgs pa;
  auto* patch_cmd = app.add_subcommand("patch", "Split a plan into overlapping patches");
  patch_cmd->add_option("--plan", pa.plan, "Collapsed GraphML")->required();
  patch_cmd->add_option("--image", pa.image, "Plan raster (PNG)");
  patch_cmd->add_option("--out", pa.out, "Output directory")->required();
  patch_cmd->add_option("--name", pa.name, "Plan name (default: file stem)");
  patch_cmd->add_option("--patch-size", pa.spec.size, "Patch size P, px")->capture_default_str();
  patch_cmd->add_option("--stride", pa.spec.stride, "Stride S, px")->capture_default_str();
  patch_cmd->add_option("--border-box", pa.spec.border_box, "Border node box size, px")
      ->capture_default_str();

  StitchArgs sa;
  auto* stitch_cmd = app.add_subcommand("stitch", "Merge patch predictions into one plan");
  stitch_cmd->add_option("--windows", sa.windows, "Window index JSON")->required();
  stitch_cmd->add_option("--patches", sa.patches, "Patch GraphML directory (default: index dir)");
  stitch_cmd->add_option("--out", sa.out, "Stitched GraphML")->required();
  stitch_cmd->add_option("--margin", sa.cfg.margin, "Attenuation margin d, px")
      ->capture_default_str();
  stitch_cmd->add_option("--nms-iou", sa.cfg.nms_iou, "NMS IoU threshold")->capture_default_str();
  stitch_cmd->add_option("--wbf-iou", sa.cfg.wbf_iou, "WBF cluster IoU threshold")
      ->capture_default_str();
  stitch_cmd->add_option("--epsilon", sa.cfg.epsilon, "Border match tolerance, px")
      ->capture_default_str();
  stitch_cmd->add_option("--floor", sa.cfg.floor, "Minimum node confidence")
      ->capture_default_str();

  DetsimArgs da;
  auto* det_cmd = app.add_subcommand("detsim", "Corrupt ground-truth patches into predictions");
  det_cmd->add_option("--gt-patches", da.gt_patches, "windows.json, or the directory holding it")
      ->required();
  det_cmd->add_option("--out", da.out, "Output directory")->required();
  det_cmd->add_option("--noise-preset", da.preset, "zero, low, med or high")
      ->check(CLI::IsMember({"zero", "low", "med", "high"}))
      ->capture_default_str();
  det_cmd->add_option("--sigma", da.sigma, "Box jitter sigma, px (overrides preset)");
  det_cmd->add_option("--p-drop", da.p_drop, "Node drop probability");
  det_cmd->add_option("--lambda-fp", da.lambda_fp, "Mean spurious nodes per patch");
  det_cmd->add_option("--p-cls", da.p_cls, "Node class flip probability");
  det_cmd->add_option("--p-edrop", da.p_edrop, "Edge drop probability");
  det_cmd->add_option("--p-eflip", da.p_eflip, "Edge class flip probability");
  det_cmd->add_option("--seed", da.seed, "Random seed")->capture_default_str();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Node and edge mAP of predictions");
  eval_cmd->add_option("--pred", ea.pred, "Prediction GraphML file or directory")->required();
  eval_cmd->add_option("--gt", ea.gt, "Ground-truth GraphML file or directory")->required();
  eval_cmd->add_option("--match-giou", ea.opts.match_giou, "gIoU for a correct endpoint match")
      ->capture_default_str();
  eval_cmd->add_option("--iou", ea.opts.iou_threshold, "IoU threshold for node AP")
      ->capture_default_str();
  eval_cmd->add_option("--report", ea.report, "Report JSON path (default: stdout)");

  StatsArgs st;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("corpus", st.corpus, "Directory of GraphML plans")->required();
  stats_cmd->add_option("--csv", st.csv, "Per-plan CSV");
  stats_cmd->add_option("--degree-csv", st.degree_csv, "Pooled degree histogram CSV");

  FoldsArgs fa;
  auto* folds_cmd = app.add_subcommand("folds", "Cross-validation fold files");
  auto* plans_opt = folds_cmd->add_option("--plans", fa.plans, "Directory of GraphML plans");
  auto* manifest_opt = folds_cmd->add_option("--manifest", fa.manifest, "Corpus manifest");
  plans_opt->excludes(manifest_opt);
  folds_cmd->add_option("--k", fa.k, "Folds per seed")->capture_default_str();
  folds_cmd->add_option("--seeds", fa.seeds, "Shuffle seeds")->delimiter(',')->capture_default_str();
  folds_cmd->add_option("--out", fa.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "pidforge 1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (folds_cmd->parsed() && fa.plans.empty() && fa.manifest.empty()) {
    err << "error: folds needs --plans or --manifest\n\n" << folds_cmd->help();
    return kExitUsage;
  }

  ga.cfg.background = static_cast<std::uint8_t>(background);
  const auto* cmd = app.get_subcommands().front();
  Log log(err, cmd->get_name());
  log.verbosity = quiet ? -1 : std::min(verbose, 1);
  kernels::set_max_threads(jobs);

  try {
    if (cmd == collapse_cmd) return do_collapse(ca, log);
    if (cmd == gen_cmd) return do_generate(ga, log);
    if (cmd == patch_cmd) return do_patch(pa, log);
    if (cmd == stitch_cmd) return do_stitch(sa, log);
    if (cmd == det_cmd) return do_detsim(da, log);
    if (cmd == eval_cmd) return do_eval(ea, log, out);
    if (cmd == stats_cmd) return do_stats(st, log, out);
    if (cmd == folds_cmd) return do_folds(fa, log);
  } catch (const io::InvalidGraphError& e) {
    log(Level::kError, "invalid_graph", {{"detail", e.what()}});
    for (const auto& v : e.violations) {
      log(Level::kError, "violation", {{"subject", v.subject}, {"rule", v.rule}, {"detail", v.message}});
    }
    return kExitData;
  } catch (const DataError& e) {
    log(Level::kError, "data_error", {{"detail", e.what()}});
    return kExitData;
  } catch (const std::invalid_argument& e) {
    log(Level::kError, "bad_argument", {{"detail", e.what()}});
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    log(Level::kError, "io_error", {{"detail", e.what()}});
    return kExitData;
  } catch (const std::exception& e) {
    log(Level::kError, "internal_error", {{"detail", e.what()}});
    return kExitInternal;
  }
  log(Level::kError, "internal_error", {{"detail", "unhandled subcommand"}});
  return kExitInternal;
}

}  // namespace pidforge::cli
