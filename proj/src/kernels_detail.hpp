#pragma once

// Shared per-element helpers for the serial and OpenMP kernels.

#include <cmath>
#include <numbers>
#include <vector>

#include "pidforge/kernels.hpp"

namespace pidforge::kernels::detail {

struct Tap {
  int src;
  double weight;
};

/// Source taps (with fractional coverage) for each of `out` bins over `in`
/// source samples.
inline std::vector<std::vector<Tap>> area_taps(int in, int out) {
  std::vector<std::vector<Tap>> taps(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    for (int s = static_cast<int>(std::floor(lo)); s < in && s < hi; ++s) {
      const double w = std::min<double>(s + 1, hi) - std::max<double>(s, lo);
      if (w > 0.0) taps[o].push_back({s, w / scale});
    }
  }
  return taps;
}

inline std::vector<double> dct_basis(int n) {
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  for (int u = 0; u < n; ++u) {
    const double alpha = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int x = 0; x < n; ++x) {
      c[static_cast<std::size_t>(u) * n + x] =
          alpha * std::cos(std::numbers::pi * (2 * x + 1) * u / (2.0 * n));
    }
  }
  return c;
}

inline double row_tap_sum(const Image& img, int y, const std::vector<Tap>& taps) {
  double acc = 0.0;
  for (const Tap& t : taps) acc += t.weight * img.at(t.src, y);
  return acc;
}

}  // namespace pidforge::kernels::detail
