#include "pidforge/dedup.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "pidforge/kernels.hpp"

namespace pidforge::dedup {
namespace {

// FNV-1a over 64-bit words followed by a splitmix64 finaliser.
class Digest {
 public:
  Digest& add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (v >> (8 * i)) & 0xffu;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Digest& add(std::string_view s) {
    add(s.size());
    for (unsigned char c : s) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  std::uint64_t value() const {
    std::uint64_t z = state_ + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace

WlHash wl_hash(const ProcessGraph& g, const WlOptions& opts) {
  const auto index = g.node_index();
  const std::size_t n = g.nodes.size();
  std::vector<std::uint64_t> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Node& v = g.nodes[i];
    Digest d;
    d.add(to_string(v.cls));
    if (opts.layout_aware) {
      const Point c = v.box.center();
      d.add(v.template_id)
          .add(static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(c.x / opts.cell))))
          .add(static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(c.y / opts.cell))));
    }
    label[i] = d.value();
  }

  struct Incidence {
    std::size_t other;
    std::uint64_t edge_class;
  };
  std::vector<std::vector<Incidence>> adj(n);
  std::size_t edge_count = 0;
  for (const Edge& e : g.edges) {
    auto s = index.find(e.source);
    auto t = index.find(e.target);
    if (s == index.end() || t == index.end()) continue;
    ++edge_count;
    const auto cls = static_cast<std::uint64_t>(e.cls);
    adj[s->second].push_back({t->second, cls});
    adj[t->second].push_back({s->second, cls});
  }

  std::vector<std::uint64_t> next(n);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> multiset;
  for (int round = 0; round < opts.iterations; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      multiset.clear();
      for (const Incidence& inc : adj[i]) multiset.emplace_back(inc.edge_class, label[inc.other]);
      std::sort(multiset.begin(), multiset.end());
      Digest d;
      d.add(label[i]).add(multiset.size());
      for (auto [c, l] : multiset) d.add(c).add(l);
      next[i] = d.value();
    }
    label.swap(next);
  }

  std::sort(label.begin(), label.end());
  Digest d;
  d.add(n).add(edge_count);
  for (std::uint64_t l : label) d.add(l);
  return {d.value(), opts.iterations};
}

PHash phash(const Image& img) {
  if (img.width < 32 || img.height < 32) {
    throw std::invalid_argument("phash needs an image of at least 32x32, got " +
                                std::to_string(img.width) + "x" +
                                std::to_string(img.height));
  }
  const kernels::Matrix small = kernels::parallel::area_downscale(img, 32, 32);
  const kernels::Matrix dct = kernels::parallel::dct2(small);

  // Round-off on flat images leaves AC terms of order 1e-13 with arbitrary
  // sign; snap them to zero so uniform images hash to 0.
  constexpr double kZero = 1e-7;
  std::vector<double> coeffs;
  coeffs.reserve(63);
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      if (u == 0 && v == 0) continue;
      const double c = dct(u, v);
      coeffs.push_back(std::abs(c) < kZero ? 0.0 : c);
    }
  }
  std::vector<double> sorted = coeffs;
  std::nth_element(sorted.begin(), sorted.begin() + 31, sorted.end());
  const double median = sorted[31];
  std::uint64_t bits = 0;
  for (int i = 0; i < 63; ++i) {
    if (coeffs[i] > median) bits |= std::uint64_t{1} << i;
  }
  return {bits};
}

int hamming(PHash a, PHash b) { return std::popcount(a.bits ^ b.bits); }

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t from_hex(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos, 16);
  if (pos != s.size()) throw std::invalid_argument("bad hex '" + s + "'");
  return v;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kAccept: return "accept";
    case Verdict::kRejectStructural: return "structural";
    case Verdict::kRejectVisual: return "visual";
  }
  return "?";
}

Decision Registry::try_accept(const ProcessGraph& g, const Image& img) {
  return try_accept(wl_hash(g, wl_), phash(img));
}

Decision Registry::try_accept(WlHash wl, PHash ph) {
  Decision d;
  d.wl = wl;
  d.ph = ph;
  if (wl_seen_.count(wl.digest)) {
    d.verdict = Verdict::kRejectStructural;
    return d;
  }
  d.min_distance = kernels::parallel::min_hamming(ph.bits, phashes_);
  if (d.min_distance < tau_) {
    d.verdict = Verdict::kRejectVisual;
    return d;
  }
  record(wl, ph);
  d.verdict = Verdict::kAccept;
  return d;
}

void Registry::record(WlHash wl, PHash ph) {
  wl_seen_.insert(wl.digest);
  phashes_.push_back(ph.bits);
}

}  // namespace pidforge::dedup
