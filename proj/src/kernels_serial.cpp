#include <bit>

#include "kernels_detail.hpp"
#include "pidforge/geometry.hpp"

namespace pidforge::kernels::serial {

Matrix area_downscale(const Image& img, int out_w, int out_h) {
  const auto xt = detail::area_taps(img.width, out_w);
  const auto yt = detail::area_taps(img.height, out_h);
  Matrix horiz(img.height, out_w);
  for (int y = 0; y < img.height; ++y) {
    for (int ox = 0; ox < out_w; ++ox) horiz(y, ox) = detail::row_tap_sum(img, y, xt[ox]);
  }
  Matrix out(out_h, out_w);
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
  for (int y = 0; y < n; ++y) {
    for (int v = 0; v < n; ++v) {
      double acc = 0.0;
      for (int x = 0; x < n; ++x) acc += c[static_cast<std::size_t>(v) * n + x] * in(y, x);
      rows(y, v) = acc;
    }
  }
  Matrix out(n, n);
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
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) m(i, j) = geometry::giou(a[i], b[j]);
  }
  return m;
}

int min_hamming(std::uint64_t query, std::span<const std::uint64_t> hashes) {
  int best = 65;
  for (std::uint64_t h : hashes) best = std::min(best, std::popcount(query ^ h));
  return best;
}

}  // namespace pidforge::kernels::serial
