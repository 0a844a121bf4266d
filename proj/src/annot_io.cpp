#include "pidforge/annot_io.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <cctype>

#include "json.hpp"
#include <optional>
#include <sstream>
#include <stdexcept>

namespace pidforge::io {
namespace {

using boost::property_tree::ptree;
using nlohmann::json;

std::string escape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw SchemaError(what + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<Point> parse_route(const std::string& text, const std::string& what) {
  std::vector<Point> pts;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    auto comma = tok.find(',');
    if (comma == std::string::npos) throw SchemaError(what + ": bad route point '" + tok + "'");
    pts.push_back({parse_number(tok.substr(0, comma), what),
                   parse_number(tok.substr(comma + 1), what)});
  }
  return pts;
}

std::string attr(const ptree& node, const char* name) {
  // '/' separator: attribute names such as attr.name contain dots.
  return node.get<std::string>(ptree::path_type(std::string("<xmlattr>/") + name, '/'), "");
}

// Collects <data key=...> children, translated to attr.name.
std::map<std::string, std::string> data_of(const ptree& elem,
                                           const std::map<std::string, std::string>& keys) {
  std::map<std::string, std::string> out;
  for (const auto& [tag, child] : elem) {
    if (tag != "data") continue;
    const std::string key = attr(child, "key");
    auto it = keys.find(key);
    out[it == keys.end() ? key : it->second] = child.get_value<std::string>();
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

ProcessGraph parse_graphml(const std::string& xml, const std::string& source) {
  ptree doc;
  try {
    std::istringstream is(xml);
    boost::property_tree::read_xml(is, doc);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError(source + ":" + std::to_string(e.line()) + ": " + e.message(),
                     static_cast<int>(e.line()));
  }
  auto root = doc.get_child_optional("graphml");
  if (!root) throw SchemaError(source + ": missing <graphml> root element");

  std::map<std::string, std::string> keys;  // key id -> attr.name
  for (const auto& [tag, child] : *root) {
    if (tag != "key") continue;
    std::string name = attr(child, "attr.name");
    keys[attr(child, "id")] = name.empty() ? attr(child, "id") : name;
  }

  ProcessGraph g;
  auto graph = root->get_child_optional("graph");
  if (!graph) return g;

  const auto gdata = data_of(*graph, keys);
  if (auto it = gdata.find("stage"); it != gdata.end()) g.stage = parse_stage(it->second);
  if (auto it = gdata.find("width"); it != gdata.end())
    g.canvas.width = static_cast<int>(parse_number(it->second, "graph width"));
  if (auto it = gdata.find("height"); it != gdata.end())
    g.canvas.height = static_cast<int>(parse_number(it->second, "graph height"));

  int edge_counter = 0;
  for (const auto& [tag, child] : *graph) {
    if (tag == "node") {
      Node n;
      n.id = attr(child, "id");
      if (n.id.empty()) throw SchemaError(source + ": node without id");
      const auto d = data_of(child, keys);
      auto req = [&](const char* k) -> const std::string& {
        auto it = d.find(k);
        if (it == d.end()) {
          throw SchemaError(source + ": node " + n.id + ": missing attribute '" + k + "'");
        }
        return it->second;
      };
      const std::string what = source + ": node " + n.id;
      n.cls = parse_node_class(req("cls"));
      n.box = {parse_number(req("x1"), what), parse_number(req("y1"), what),
               parse_number(req("x2"), what), parse_number(req("y2"), what)};
      if (auto it = d.find("conf"); it != d.end()) n.confidence = parse_number(it->second, what);
      if (auto it = d.find("tmpl"); it != d.end()) n.template_id = it->second;
      g.nodes.push_back(std::move(n));
    } else if (tag == "edge") {
      Edge e;
      e.id = attr(child, "id");
      if (e.id.empty()) e.id = "e" + std::to_string(edge_counter);
      ++edge_counter;
      e.source = attr(child, "source");
      e.target = attr(child, "target");
      if (e.source.empty() || e.target.empty()) {
        throw SchemaError(source + ": edge " + e.id + ": missing source/target");
      }
      const auto d = data_of(child, keys);
      const std::string what = source + ": edge " + e.id;
      auto it = d.find("cls");
      if (it == d.end()) throw SchemaError(what + ": missing attribute 'cls'");
      e.cls = parse_edge_class(it->second);
      if (auto c = d.find("conf"); c != d.end()) e.confidence = parse_number(c->second, what);
      if (auto r = d.find("route"); r != d.end()) e.route = parse_route(r->second, what);
      g.edges.push_back(std::move(e));
    }
  }
  return g;
}

ProcessGraph read_graphml(const std::filesystem::path& path) {
  return parse_graphml(read_text(path), path.string());
}

std::string to_graphml(const ProcessGraph& g) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
     << "  <key id=\"stage\" for=\"graph\" attr.name=\"stage\" attr.type=\"string\"/>\n"
     << "  <key id=\"width\" for=\"graph\" attr.name=\"width\" attr.type=\"int\"/>\n"
     << "  <key id=\"height\" for=\"graph\" attr.name=\"height\" attr.type=\"int\"/>\n"
     << "  <key id=\"cls\" for=\"all\" attr.name=\"cls\" attr.type=\"string\"/>\n"
     << "  <key id=\"conf\" for=\"all\" attr.name=\"conf\" attr.type=\"double\"/>\n";
  for (const char* k : {"x1", "y1", "x2", "y2"}) {
    os << "  <key id=\"" << k << "\" for=\"node\" attr.name=\"" << k
       << "\" attr.type=\"double\"/>\n";
  }
  os << "  <key id=\"tmpl\" for=\"node\" attr.name=\"tmpl\" attr.type=\"string\"/>\n"
     << "  <key id=\"route\" for=\"edge\" attr.name=\"route\" attr.type=\"string\"/>\n"
     << "  <graph id=\"G\" edgedefault=\"undirected\">\n"
     << "    <data key=\"stage\">" << to_string(g.stage) << "</data>\n"
     << "    <data key=\"width\">" << g.canvas.width << "</data>\n"
     << "    <data key=\"height\">" << g.canvas.height << "</data>\n";
  for (const Node& n : g.nodes) {
    os << "    <node id=\"" << escape_xml(n.id) << "\">"
       << "<data key=\"cls\">" << to_string(n.cls) << "</data>"
       << "<data key=\"x1\">" << format_double(n.box.x1) << "</data>"
       << "<data key=\"y1\">" << format_double(n.box.y1) << "</data>"
       << "<data key=\"x2\">" << format_double(n.box.x2) << "</data>"
       << "<data key=\"y2\">" << format_double(n.box.y2) << "</data>"
       << "<data key=\"conf\">" << format_double(n.confidence) << "</data>";
    if (!n.template_id.empty()) {
      os << "<data key=\"tmpl\">" << escape_xml(n.template_id) << "</data>";
    }
    os << "</node>\n";
  }
  for (const Edge& e : g.edges) {
    os << "    <edge id=\"" << escape_xml(e.id) << "\" source=\"" << escape_xml(e.source)
       << "\" target=\"" << escape_xml(e.target) << "\">"
       << "<data key=\"cls\">" << to_string(e.cls) << "</data>"
       << "<data key=\"conf\">" << format_double(e.confidence) << "</data>";
    if (!e.route.empty()) {
      os << "<data key=\"route\">";
      for (std::size_t i = 0; i < e.route.size(); ++i) {
        if (i) os << ' ';
        os << format_double(e.route[i].x) << ',' << format_double(e.route[i].y);
      }
      os << "</data>";
    }
    os << "</edge>\n";
  }
  os << "  </graph>\n</graphml>\n";
  return os.str();
}

void write_graphml(const ProcessGraph& g, const std::filesystem::path& path) {
  auto violations = validate(g);
  if (!violations.empty()) {
    throw InvalidGraphError("refusing to write invalid graph to " + path.string() +
                                ":\n" + format_violations(violations),
                            std::move(violations));
  }
  write_text(path, to_graphml(g));
}

std::string manifest_line(const ManifestEntry& e) {
  json j = {{"schema_version", kSchemaVersion},
            {"image", e.image},
            {"annotation", e.annotation},
            {"seed", e.seed},
            {"wl_hash", e.wl_hash},
            {"phash", e.phash},
            {"attempt", e.attempt},
            {"accepted_at", e.accepted_at}};
  return j.dump();
}

ManifestEntry parse_manifest_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    ManifestEntry e;
    e.image = j.at("image").get<std::string>();
    e.annotation = j.at("annotation").get<std::string>();
    e.seed = j.at("seed").get<std::string>();
    e.wl_hash = j.at("wl_hash").get<std::string>();
    e.phash = j.at("phash").get<std::string>();
    e.attempt = j.at("attempt").get<std::int64_t>();
    e.accepted_at = j.value("accepted_at", "");
    return e;
  } catch (const json::exception& ex) {
    throw SchemaError(std::string("manifest line: ") + ex.what());
  }
}

void append_manifest(const std::filesystem::path& path, const ManifestEntry& e) {
  std::ofstream f(path, std::ios::app);
  if (!f) throw DataError("cannot open manifest " + path.string());
  f << manifest_line(e) << '\n';
  f.flush();
  if (!f) throw DataError("manifest append failed: " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::vector<ManifestEntry> out;
  std::ifstream f(path);
  if (!f) return out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_manifest_line(line));
  }
  return out;
}

std::vector<FoldSplit> make_folds(const std::vector<std::string>& plan_ids, int k,
                                  const std::vector<std::uint64_t>& seeds) {
  if (k < 1) throw std::invalid_argument("fold count must be >= 1");
  if (static_cast<std::size_t>(k) > plan_ids.size()) {
    throw std::invalid_argument("fold count " + std::to_string(k) + " exceeds " +
                                std::to_string(plan_ids.size()) + " plan ids");
  }
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");

  std::vector<FoldSplit> out;
  for (std::uint64_t seed : seeds) {
    std::vector<std::string> ids = plan_ids;
    std::sort(ids.begin(), ids.end());
    // Explicit Fisher-Yates with rejection sampling so splits are identical
    // across standard library implementations.
    std::mt19937_64 rng(seed);
    for (std::size_t i = ids.size(); i > 1; --i) {
      const std::uint64_t bound = i;
      const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
      std::uint64_t r;
      do {
        r = rng();
      } while (r >= limit);
      std::swap(ids[i - 1], ids[r % bound]);
    }
    FoldSplit split;
    split.k = k;
    split.seed = seed;
    split.folds.resize(k);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      split.folds[i % k].test.push_back(ids[i]);
    }
    for (int f = 0; f < k; ++f) {
      for (int g = 0; g < k; ++g) {
        if (g == f) continue;
        auto& train = split.folds[f].train;
        train.insert(train.end(), split.folds[g].test.begin(), split.folds[g].test.end());
      }
      std::sort(split.folds[f].train.begin(), split.folds[f].train.end());
    }
    out.push_back(std::move(split));
  }
  return out;
}

std::string fold_json(const FoldSplit& split) {
  json folds = json::array();
  for (const Fold& f : split.folds) folds.push_back({{"train", f.train}, {"test", f.test}});
  json j = {{"schema_version", kSchemaVersion},
            {"k", split.k},
            {"seed", split.seed},
            {"folds", folds}};
  return j.dump(2) + "\n";
}

FoldSplit parse_fold_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    FoldSplit s;
    s.k = j.at("k").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& f : j.at("folds")) {
      s.folds.push_back({f.at("train").get<std::vector<std::string>>(),
                         f.at("test").get<std::vector<std::string>>()});
    }
    return s;
  } catch (const json::exception& ex) {
    throw SchemaError(std::string("fold file: ") + ex.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw DataError("write failed: " + path.string());
}

}  // namespace pidforge::io
