#pragma once

// GraphML annotations, corpus manifests and cross-validation fold files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pidforge/graph.hpp"
#include "pidforge/types.hpp"

namespace pidforge::io {

inline constexpr int kSchemaVersion = 1;

/// Malformed XML. `line` is 1-based, 0 when unknown.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, int line)
      : DataError(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A required attribute is missing or unparsable.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

/// Rejected write of a graph that fails validate().
class InvalidGraphError : public DataError {
 public:
  InvalidGraphError(const std::string& what, std::vector<Violation> v)
      : DataError(what), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

// GraphML dialect. Node data keys: cls, x1, y1, x2, y2, conf, and optional
// tmpl (symbol template). Edge keys: cls, conf, and optional route
// ("x,y x,y ..."). Graph keys: stage, width, height. Keys are resolved by
// attr.name, so files using other key ids still load.
ProcessGraph parse_graphml(const std::string& xml, const std::string& source = "<string>");
ProcessGraph read_graphml(const std::filesystem::path& path);
std::string to_graphml(const ProcessGraph& g);
void write_graphml(const ProcessGraph& g, const std::filesystem::path& path);

/// Shortest decimal representation that round-trips exactly.
std::string format_double(double v);

struct ManifestEntry {
  std::string image;
  std::string annotation;
  std::string seed;
  std::string wl_hash;      // 16 hex digits
  std::string phash;        // 16 hex digits
  std::int64_t attempt = 0;
  std::string accepted_at;  // ISO-8601 UTC
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// One JSON object per line. Callers serialise appends (single writer).
std::string manifest_line(const ManifestEntry& e);
ManifestEntry parse_manifest_line(const std::string& line);
void append_manifest(const std::filesystem::path& path, const ManifestEntry& e);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Cross-validation protocol: K folds repeated over three shuffle seeds.
inline constexpr int kDefaultFolds = 5;
inline constexpr std::uint64_t kDefaultFoldSeeds[] = {0, 1, 2};

struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> test;
  friend bool operator==(const Fold&, const Fold&) = default;
};

struct FoldSplit {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
  friend bool operator==(const FoldSplit&, const FoldSplit&) = default;
};

/// One K-fold partition per seed: seeded Fisher-Yates shuffle, then
/// round-robin assignment. Throws std::invalid_argument when K is out of
/// range or no seeds are given.
std::vector<FoldSplit> make_folds(const std::vector<std::string>& plan_ids, int k,
                                  const std::vector<std::uint64_t>& seeds);

std::string fold_json(const FoldSplit& split);
FoldSplit parse_fold_json(const std::string& text);

std::string read_text(const std::filesystem::path& path);
/// Creates missing parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pidforge::io
