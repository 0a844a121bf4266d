#pragma once

// Corpus statistics: per-plan counts, summary row and pooled degrees.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pidforge/graph.hpp"

namespace pidforge::stats {

struct PlanStats {
  std::string plan;
  GraphStats stats;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

MeanStd mean_std(const std::vector<double>& values);

struct StatsReport {
  std::vector<PlanStats> plans;  // by file name
  std::vector<std::string> warnings;
  MeanStd nodes;
  MeanStd edges;
  std::map<int, int> pooled_degrees;
};

StatsReport summarize(std::vector<PlanStats> plans);

/// Reads every *.graphml directly inside `dir`; unreadable plans are
/// skipped with a warning.
StatsReport stats_report(const std::filesystem::path& dir);

/// plan,nodes,edges,density,degree_histogram ("degree:count" pairs).
std::string plans_csv(const StatsReport& r);
/// degree,count over all plans.
std::string degree_csv(const StatsReport& r);
/// "count=N nodes=M±S edges=M±S"; means and deviations are "-" when empty.
std::string summary_line(const StatsReport& r);

}  // namespace pidforge::stats
