#include <omp.h>

#include <bit>

#include "kernels_detail.hpp"
#include "pidforge/geometry.hpp"

namespace pidforge::kernels {

void set_max_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

namespace parallel {

Matrix area_downscale(const Image& img, int out_w, int out_h) {
  const auto xt = detail::area_taps(img.width, out_w);
  const auto yt = detail::area_taps(img.height, out_h);
  Matrix horiz(img.height, out_w);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height; ++y) {
    for (int ox = 0; ox < out_w; ++ox) horiz(y, ox) = detail::row_tap_sum(img, y, xt[ox]);
  }
  Matrix out(out_h, out_w);
#pragma omp parallel for collapse(2) schedule(static)
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      double acc = 0.0;
      for (const auto& t : yt[oy]) acc += t.weight * horiz(t.src, ox);
      out(oy, ox) = acc;
    }
  }
  return out;
}

Matrix dct2(const Matrix& in) {
  const int n = in.rows;
  const auto c = detail::dct_basis(n);
  Matrix rows(n, n);
#pragma omp parallel for collapse(2) schedule(static)
  for (int y = 0; y < n; ++y) {
    for (int v = 0; v < n; ++v) {
      double acc = 0.0;
      for (int x = 0; x < n; ++x) acc += c[static_cast<std::size_t>(v) * n + x] * in(y, x);
      rows(y, v) = acc;
    }
  }
  Matrix out(n, n);
#pragma omp parallel for collapse(2) schedule(static)
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      double acc = 0.0;
      for (int y = 0; y < n; ++y) acc += c[static_cast<std::size_t>(u) * n + y] * rows(y, v);
      out(u, v) = acc;
    }
  }
  return out;
}

Matrix giou_matrix(std::span<const BBox> a, std::span<const BBox> b) {
  Matrix m(static_cast<int>(a.size()), static_cast<int>(b.size()));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) m(i, j) = geometry::giou(a[i], b[j]);
  }
  return m;
}

int min_hamming(std::uint64_t query, std::span<const std::uint64_t> hashes) {
  int best = 65;
  const auto n = static_cast<std::ptrdiff_t>(hashes.size());
#pragma omp parallel for reduction(min : best) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    best = std::min(best, std::popcount(query ^ hashes[i]));
  }
  return best;
}

}  // namespace parallel
}  // namespace pidforge::kernels
