#pragma once

// Node and edge detection metrics for predicted process graphs.

#include <string>
#include <vector>

#include "pidforge/kernels.hpp"
#include "pidforge/types.hpp"

namespace pidforge::metrics {

/// Minimum-cost assignment on a square cost matrix (O(n^3) potentials
/// method). Returns the column assigned to each row.
std::vector<int> hungarian(const kernels::Matrix& cost);

struct MatchPair {
  std::string pred;
  std::string gt;
  double giou = 0.0;
  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // sorted by pred id
  std::vector<std::string> unmatched_pred;
  std::vector<std::string> unmatched_gt;
  /// Total gIoU of the optimal assignment before pairs with gIoU <= 0 are
  /// discarded.
  double assignment_giou = 0.0;
};

/// Hungarian matching on cost 1 - gIoU, padded to square with cost 2. Nodes
/// are ordered by id before solving, which fixes the choice among equal-cost
/// optima. Border nodes are ignored.
MatchResult match_nodes(const ProcessGraph& pred, const ProcessGraph& gt);

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

struct ClassAP {
  std::string cls;
  double ap = 0.0;
  int gt_count = 0;
  int pred_count = 0;
  int true_positives = 0;
  std::vector<PRPoint> curve;
};

struct APResult {
  std::vector<ClassAP> per_class;  // vocabulary order
  double mean = 0.0;               // over classes present in gt
};

/// Scored predictions in rank order (confidence desc, id asc), each flagged
/// true or false positive.
struct Scored {
  double confidence = 0.0;
  bool tp = false;
};

/// All-point AP with a monotone precision envelope. A class with no gt
/// scores 1 when it also has no predictions, 0 otherwise.
double average_precision(const std::vector<Scored>& ranked, int gt_count,
                         std::vector<PRPoint>* curve = nullptr);

APResult node_map(const ProcessGraph& pred, const ProcessGraph& gt, double iou_threshold = 0.5);

/// Endpoints count as correctly matched when their pair has gIoU >=
/// match_giou. Node classes play no part in edge matching.
APResult edge_map(const ProcessGraph& pred, const ProcessGraph& gt, const MatchResult& match,
                  double match_giou = 0.5);

struct EvalOptions {
  double iou_threshold = 0.5;
  double match_giou = 0.5;
};

struct EvalReport {
  std::string plan;
  APResult nodes;
  APResult edges;
  MatchResult match;
  std::vector<std::string> warnings;
};

EvalReport evaluate_plan(const ProcessGraph& pred, const ProcessGraph& gt,
                         const EvalOptions& opts = {});

struct Aggregate {
  int plans = 0;
  double node_map = 0.0;  // unweighted mean over plans
  double edge_map = 0.0;
};

Aggregate aggregate(const std::vector<EvalReport>& reports);

/// Versioned JSON with per-plan, per-class APs and PR samples.
std::string report_json(const std::vector<EvalReport>& reports, const EvalOptions& opts);

}  // namespace pidforge::metrics
