#pragma once

// Core domain types for process graphs extracted from P&ID drawings.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pidforge {

/// Node vocabulary. The first seven values are physical components; the
/// remaining three exist only during pre-processing or patch handling.
enum class NodeClass : std::uint8_t {
  kValve,
  kPump,
  kInstrumentation,
  kGeneral,
  kTank,
  kArrow,
  kInletOutlet,
  kConnector,
  kCrossing,
  kBorder,
};

enum class EdgeClass : std::uint8_t { kSolid, kNonSolid };

inline constexpr std::array<NodeClass, 7> kPhysicalClasses = {
    NodeClass::kValve, NodeClass::kPump,  NodeClass::kInstrumentation,
    NodeClass::kGeneral, NodeClass::kTank, NodeClass::kArrow,
    NodeClass::kInletOutlet};

inline constexpr std::array<EdgeClass, 2> kEdgeClasses = {EdgeClass::kSolid,
                                                          EdgeClass::kNonSolid};

constexpr bool is_physical(NodeClass c) {
  return c != NodeClass::kConnector && c != NodeClass::kCrossing &&
         c != NodeClass::kBorder;
}

std::string_view to_string(NodeClass c);
std::string_view to_string(EdgeClass c);

/// Throws VocabularyError on unknown names. Accepts "inlet/outlet" and
/// "non-solid" as aliases.
NodeClass parse_node_class(std::string_view s);
EdgeClass parse_edge_class(std::string_view s);

enum class Stage : std::uint8_t { kRaw, kCollapsed, kPatch, kStitched };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);

// Errors raised on bad input data. CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VocabularyError : public DataError {
 public:
  using DataError::DataError;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in pixel coordinates, origin top-left. Area arithmetic
/// treats it as half-open [x1,x2) x [y1,y2).
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  Point center() const { return {(x1 + x2) / 2.0, (y1 + y2) / 2.0}; }
  bool valid() const;
  BBox translated(double dx, double dy) const {
    return {x1 + dx, y1 + dy, x2 + dx, y2 + dy};
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Node {
  std::string id;
  NodeClass cls = NodeClass::kGeneral;
  BBox box;
  double confidence = 1.0;
  std::string template_id;  // empty unless assigned by the generator
  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  std::string id;
  std::string source;
  std::string target;
  EdgeClass cls = EdgeClass::kSolid;
  double confidence = 1.0;
  std::vector<Point> route;  // rectilinear pipe polyline, source to target
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Canvas {
  int width = 0;
  int height = 0;
  friend bool operator==(const Canvas&, const Canvas&) = default;
};

/// Attributed undirected graph G = (V, E).
class ProcessGraph {
 public:
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  Canvas canvas;
  Stage stage = Stage::kRaw;

  // Lookup helpers. The index is rebuilt on demand; callers mutating
  // `nodes` directly must not hold on to returned pointers.
  const Node* find_node(std::string_view id) const;
  std::unordered_map<std::string, std::size_t> node_index() const;

  /// Adjacency lists by node position, built from `edges`; edges whose
  /// endpoints are missing are skipped.
  std::vector<std::vector<std::size_t>> adjacency() const;

  friend bool operator==(const ProcessGraph&, const ProcessGraph&) = default;
};

/// Unordered endpoint key, smaller id first.
inline std::pair<std::string, std::string> edge_key(const std::string& a,
                                                    const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace pidforge
