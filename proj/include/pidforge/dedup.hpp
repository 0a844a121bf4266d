#pragma once

// Acceptance filter for synthetic plans: Weisfeiler-Lehman hashing catches
// structural duplicates, perceptual hashing catches visual near-duplicates.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "pidforge/image.hpp"
#include "pidforge/types.hpp"

namespace pidforge::dedup {

struct WlOptions {
  int iterations = 3;
  // Extends the initial node label with the symbol template id and the
  // node centre quantised to `cell` px. Without it every perturbation of
  // one seed hashes identically, since adjacency never changes.
  bool layout_aware = false;
  double cell = 250.0;
};

struct WlHash {
  std::uint64_t digest = 0;
  int iterations = 0;
  friend bool operator==(const WlHash&, const WlHash&) = default;
};

/// Label refinement: round 0 labels are node classes (plus layout when
/// enabled); each round hashes (label, sorted multiset of (edge class,
/// neighbour label)). The result digests the sorted final labels with |V|
/// and |E|. Node ids never influence the value.
WlHash wl_hash(const ProcessGraph& g, const WlOptions& opts = {});

struct PHash {
  std::uint64_t bits = 0;
  friend bool operator==(const PHash&, const PHash&) = default;
};

/// DCT perceptual hash: 32x32 area-average downscale, 2-D DCT-II, the 8x8
/// low-frequency block without DC, bit i set when coefficient i exceeds
/// the median of the 63. Bit 63 is always zero. Throws
/// std::invalid_argument for images smaller than 32x32.
PHash phash(const Image& img);

int hamming(PHash a, PHash b);

std::string to_hex(std::uint64_t v);
std::uint64_t from_hex(const std::string& s);

enum class Verdict : std::uint8_t { kAccept, kRejectStructural, kRejectVisual };

std::string_view to_string(Verdict v);

struct Decision {
  Verdict verdict = Verdict::kAccept;
  WlHash wl;
  PHash ph;
  int min_distance = 65;  // to the nearest accepted pHash; 65 when none
};

/// Accepted hashes. Decisions depend on arrival order; callers serialise
/// try_accept (single writer).
class Registry {
 public:
  explicit Registry(int tau = 10, WlOptions wl = {3, true, 250.0})
      : tau_(tau), wl_(wl) {}

  Decision try_accept(const ProcessGraph& g, const Image& img);
  /// Same decision for hashes computed elsewhere.
  Decision try_accept(WlHash wl, PHash ph);
  /// Records hashes without checking, e.g. when resuming from a manifest.
  void record(WlHash wl, PHash ph);

  int tau() const { return tau_; }
  const WlOptions& wl_options() const { return wl_; }
  std::size_t size() const { return phashes_.size(); }
  bool contains(std::uint64_t wl) const { return wl_seen_.count(wl) > 0; }

 private:
  int tau_;
  WlOptions wl_;
  std::set<std::uint64_t> wl_seen_;
  std::vector<std::uint64_t> phashes_;
};

}  // namespace pidforge::dedup
