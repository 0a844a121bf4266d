#include "pidforge/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "pidforge/annot_io.hpp"
#include "pidforge/geometry.hpp"

namespace pidforge::metrics {

std::vector<int> hungarian(const kernels::Matrix& cost) {
  const int n = cost.rows;
  if (cost.cols != n) throw std::invalid_argument("hungarian expects a square matrix");
  if (n == 0) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; p[j] is the row matched to column j, column 0 is
  // the virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

namespace {

std::vector<const Node*> sorted_nodes(const ProcessGraph& g) {
  std::vector<const Node*> out;
  for (const Node& n : g.nodes) {
    if (n.cls != NodeClass::kBorder) out.push_back(&n);
  }
  std::sort(out.begin(), out.end(), [](const Node* a, const Node* b) { return a->id < b->id; });
  return out;
}

template <typename T>
void rank(std::vector<const T*>& items) {
  std::sort(items.begin(), items.end(), [](const T* a, const T* b) {
    if (a->confidence != b->confidence) return a->confidence > b->confidence;
    return a->id < b->id;
  });
}

double mean_over_present(const std::vector<ClassAP>& per_class, bool any_pred) {
  double sum = 0.0;
  int present = 0;
  for (const auto& c : per_class) {
    if (c.gt_count == 0) continue;
    sum += c.ap;
    ++present;
  }
  if (present == 0) return any_pred ? 0.0 : 1.0;
  return sum / present;
}

}  // namespace

MatchResult match_nodes(const ProcessGraph& pred, const ProcessGraph& gt) {
  const auto p = sorted_nodes(pred);
  const auto g = sorted_nodes(gt);
  std::vector<BBox> pb, gb;
  for (const Node* n : p) pb.push_back(n->box);
  for (const Node* n : g) gb.push_back(n->box);
  const kernels::Matrix giou = kernels::parallel::giou_matrix(pb, gb);

  const int np = static_cast<int>(p.size()), ng = static_cast<int>(g.size());
  const int n = std::max(np, ng);
  kernels::Matrix cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost(i, j) = (i < np && j < ng) ? 1.0 - giou(i, j) : 2.0;
  }
  const auto assign = hungarian(cost);

  MatchResult out;
  std::vector<bool> gt_used(ng, false);
  for (int i = 0; i < np; ++i) {
    const int j = assign[i];
    if (j >= ng) {
      out.unmatched_pred.push_back(p[i]->id);
      continue;
    }
    out.assignment_giou += giou(i, j);
    if (giou(i, j) > 0.0) {
      out.pairs.push_back({p[i]->id, g[j]->id, giou(i, j)});
      gt_used[j] = true;
    } else {
      out.unmatched_pred.push_back(p[i]->id);
    }
  }
  for (int j = 0; j < ng; ++j) {
    if (!gt_used[j]) out.unmatched_gt.push_back(g[j]->id);
  }
  return out;
}

double average_precision(const std::vector<Scored>& ranked, int gt_count,
                         std::vector<PRPoint>* curve) {
  if (gt_count == 0) return ranked.empty() ? 1.0 : 0.0;
  std::vector<double> precision(ranked.size()), recall(ranked.size());
  int tp = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].tp) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / gt_count;
    if (curve) curve->push_back({recall[i], precision[i], ranked[i].confidence});
  }
  // Monotone envelope: best precision at any recall at least as high.
  for (std::size_t i = ranked.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (recall[i] > prev_recall) {
      ap += (recall[i] - prev_recall) * precision[i];
      prev_recall = recall[i];
    }
  }
  return ap;
}

APResult node_map(const ProcessGraph& pred, const ProcessGraph& gt, double iou_threshold) {
  APResult out;
  bool any_pred = false;
  for (NodeClass c : kPhysicalClasses) {
    std::vector<const Node*> preds, gts;
    for (const Node& n : pred.nodes) {
      if (n.cls == c) preds.push_back(&n);
    }
    for (const Node& n : gt.nodes) {
      if (n.cls == c) gts.push_back(&n);
    }
    any_pred = any_pred || !preds.empty();
    rank(preds);
    std::sort(gts.begin(), gts.end(), [](const Node* a, const Node* b) { return a->id < b->id; });
    std::vector<bool> claimed(gts.size(), false);
    std::vector<Scored> ranked;
    ClassAP cap;
    cap.cls = std::string(to_string(c));
    cap.gt_count = static_cast<int>(gts.size());
    cap.pred_count = static_cast<int>(preds.size());
    for (const Node* p : preds) {
      int best = -1;
      double best_iou = 0.0;
      for (std::size_t j = 0; j < gts.size(); ++j) {
        if (claimed[j]) continue;
        const double v = geometry::iou(p->box, gts[j]->box);
        if (v >= iou_threshold && (best < 0 || v > best_iou)) {
          best = static_cast<int>(j);
          best_iou = v;
        }
      }
      if (best >= 0) {
        claimed[best] = true;
        ++cap.true_positives;
      }
      ranked.push_back({p->confidence, best >= 0});
    }
    cap.ap = average_precision(ranked, cap.gt_count, &cap.curve);
    out.per_class.push_back(std::move(cap));
  }
  out.mean = mean_over_present(out.per_class, any_pred);
  return out;
}

APResult edge_map(const ProcessGraph& pred, const ProcessGraph& gt, const MatchResult& match,
                  double match_giou) {
  std::unordered_map<std::string, std::string> to_gt;
  for (const auto& m : match.pairs) {
    if (m.giou >= match_giou) to_gt[m.pred] = m.gt;
  }
  APResult out;
  bool any_pred = false;
  for (EdgeClass c : kEdgeClasses) {
    std::map<std::pair<std::string, std::string>, int> open;
    int gt_count = 0;
    for (const Edge& e : gt.edges) {
      if (e.cls != c) continue;
      ++open[edge_key(e.source, e.target)];
      ++gt_count;
    }
    std::vector<const Edge*> preds;
    for (const Edge& e : pred.edges) {
      if (e.cls == c) preds.push_back(&e);
    }
    any_pred = any_pred || !preds.empty();
    rank(preds);
    ClassAP cap;
    cap.cls = std::string(to_string(c));
    cap.gt_count = gt_count;
    cap.pred_count = static_cast<int>(preds.size());
    std::vector<Scored> ranked;
    for (const Edge* e : preds) {
      bool tp = false;
      const auto s = to_gt.find(e->source);
      const auto t = to_gt.find(e->target);
      if (s != to_gt.end() && t != to_gt.end()) {
        const auto it = open.find(edge_key(s->second, t->second));
        if (it != open.end() && it->second > 0) {
          --it->second;
          tp = true;
          ++cap.true_positives;
        }
      }
      ranked.push_back({e->confidence, tp});
    }
    cap.ap = average_precision(ranked, gt_count, &cap.curve);
    out.per_class.push_back(std::move(cap));
  }
  out.mean = mean_over_present(out.per_class, any_pred);
  return out;
}

EvalReport evaluate_plan(const ProcessGraph& pred, const ProcessGraph& gt,
                         const EvalOptions& opts) {
  EvalReport r;
  if (!(pred.canvas == gt.canvas)) {
    r.warnings.push_back("canvas mismatch: prediction " + std::to_string(pred.canvas.width) +
                         "x" + std::to_string(pred.canvas.height) + ", ground truth " +
                         std::to_string(gt.canvas.width) + "x" + std::to_string(gt.canvas.height));
  }
  r.match = match_nodes(pred, gt);
  r.nodes = node_map(pred, gt, opts.iou_threshold);
  r.edges = edge_map(pred, gt, r.match, opts.match_giou);
  return r;
}

Aggregate aggregate(const std::vector<EvalReport>& reports) {
  Aggregate a;
  a.plans = static_cast<int>(reports.size());
  if (reports.empty()) return a;
  for (const auto& r : reports) {
    a.node_map += r.nodes.mean;
    a.edge_map += r.edges.mean;
  }
  a.node_map /= a.plans;
  a.edge_map /= a.plans;
  return a;
}

namespace {

nlohmann::ordered_json ap_json(const APResult& r) {
  nlohmann::ordered_json j;
  j["mean"] = r.mean;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class) {
    nlohmann::ordered_json pr = nlohmann::ordered_json::array();
    for (const auto& p : c.curve) pr.push_back({p.recall, p.precision, p.threshold});
    j["classes"].push_back({{"class", c.cls},
                            {"ap", c.ap},
                            {"gt", c.gt_count},
                            {"pred", c.pred_count},
                            {"tp", c.true_positives},
                            {"pr", pr}});
  }
  return j;
}

}  // namespace

std::string report_json(const std::vector<EvalReport>& reports, const EvalOptions& opts) {
  const Aggregate a = aggregate(reports);
  nlohmann::ordered_json j;
  j["schema_version"] = io::kSchemaVersion;
  j["options"] = {{"iou_threshold", opts.iou_threshold}, {"match_giou", opts.match_giou}};
  j["summary"] = {{"plans", a.plans}, {"node_map", a.node_map}, {"edge_map", a.edge_map}};
  j["plans"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    j["plans"].push_back({{"plan", r.plan},
                          {"node_map", r.nodes.mean},
                          {"edge_map", r.edges.mean},
                          {"nodes", ap_json(r.nodes)},
                          {"edges", ap_json(r.edges)},
                          {"matched", r.match.pairs.size()},
                          {"unmatched_pred", r.match.unmatched_pred.size()},
                          {"unmatched_gt", r.match.unmatched_gt.size()},
                          {"warnings", r.warnings}});
  }
  return j.dump(2) + "\n";
}

}  // namespace pidforge::metrics
