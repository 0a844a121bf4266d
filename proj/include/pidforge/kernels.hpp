#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP version; both perform identical per-element arithmetic, so their
// outputs compare bit-for-bit.

#include <cstdint>
#include <span>
#include <vector>

#include "pidforge/image.hpp"
#include "pidforge/types.hpp"

namespace pidforge::kernels {

/// Row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

namespace serial {

/// Exact area-weighted average downscale to out_w x out_h.
Matrix area_downscale(const Image& img, int out_w, int out_h);

/// Orthonormal 2-D DCT-II of a square matrix.
Matrix dct2(const Matrix& in);

/// gIoU of every (a[i], b[j]) pair.
Matrix giou_matrix(std::span<const BBox> a, std::span<const BBox> b);

/// Smallest Hamming distance from `query` to any of `hashes`; 65 when empty.
int min_hamming(std::uint64_t query, std::span<const std::uint64_t> hashes);

}  // namespace serial

namespace parallel {

Matrix area_downscale(const Image& img, int out_w, int out_h);
Matrix dct2(const Matrix& in);
Matrix giou_matrix(std::span<const BBox> a, std::span<const BBox> b);
int min_hamming(std::uint64_t query, std::span<const std::uint64_t> hashes);

}  // namespace parallel

/// Worker cap for OpenMP regions; 0 leaves the runtime default.
void set_max_threads(int n);

}  // namespace pidforge::kernels
