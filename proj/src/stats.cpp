#include "pidforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pidforge/annot_io.hpp"

namespace pidforge::stats {

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= values.size();
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(var / values.size());
  return out;
}

StatsReport summarize(std::vector<PlanStats> plans) {
  StatsReport r;
  r.plans = std::move(plans);
  std::vector<double> nodes, edges;
  for (const auto& p : r.plans) {
    nodes.push_back(p.stats.node_count);
    edges.push_back(p.stats.edge_count);
    for (auto [d, c] : p.stats.degree_histogram) r.pooled_degrees[d] += c;
  }
  r.nodes = mean_std(nodes);
  r.edges = mean_std(edges);
  return r;
}

StatsReport stats_report(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".graphml") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<PlanStats> plans;
  std::vector<std::string> warnings;
  for (const auto& f : files) {
    try {
      plans.push_back({f.stem().string(), compute_stats(io::read_graphml(f))});
    } catch (const DataError& ex) {
      warnings.push_back("skipped " + f.filename().string() + ": " + ex.what());
    }
  }
  StatsReport r = summarize(std::move(plans));
  r.warnings = std::move(warnings);
  return r;
}

std::string plans_csv(const StatsReport& r) {
  std::ostringstream os;
  os << "plan,nodes,edges,density,degree_histogram\n";
  for (const auto& p : r.plans) {
    os << p.plan << ',' << p.stats.node_count << ',' << p.stats.edge_count << ','
       << io::format_double(p.stats.edge_density) << ',';
    bool first = true;
    for (auto [d, c] : p.stats.degree_histogram) {
      os << (first ? "" : " ") << d << ':' << c;
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

std::string degree_csv(const StatsReport& r) {
  std::ostringstream os;
  os << "degree,count\n";
  for (auto [d, c] : r.pooled_degrees) os << d << ',' << c << '\n';
  return os.str();
}

namespace {

std::string compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

}  // namespace

std::string summary_line(const StatsReport& r) {
  const std::size_t n = r.plans.size();
  auto fmt = [&](const MeanStd& m) {
    return n == 0 ? std::string("-") : compact(m.mean) + "±" + compact(m.std);
  };
  return "count=" + std::to_string(n) + " nodes=" + fmt(r.nodes) + " edges=" + fmt(r.edges);
}

}  // namespace pidforge::stats
