// Serial reference kernels against their OpenMP counterparts. Inputs are
// sized like the real workloads: a rendered plan, the 32x32 pHash grid, a
// stitched plan's boxes and a full dedup registry.

#include <benchmark/benchmark.h>

#include <random>

#include "pidforge/kernels.hpp"

using namespace pidforge;
using namespace pidforge::kernels;

namespace {

Image noise_image(int w, int h) {
  Image img(w, h);
  std::mt19937_64 rng(1);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng());
  return img;
}

std::vector<BBox> boxes(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0, 7000), len(10, 120);
  std::vector<BBox> out;
  for (int i = 0; i < n; ++i) {
    const double x = pos(rng), y = pos(rng);
    out.push_back({x, y, x + len(rng), y + len(rng)});
  }
  return out;
}

template <Matrix (*F)(const Image&, int, int)>
void BM_AreaDownscale(benchmark::State& state) {
  const Image img = noise_image(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 2 / 3);
  for (auto _ : state) benchmark::DoNotOptimize(F(img, 32, 32));
}

template <Matrix (*F)(const Matrix&)>
void BM_Dct2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Matrix m(n, n);
  std::mt19937_64 rng(2);
  for (auto& v : m.data) v = std::uniform_real_distribution<double>(0, 255)(rng);
  for (auto _ : state) benchmark::DoNotOptimize(F(m));
}

template <Matrix (*F)(std::span<const BBox>, std::span<const BBox>)>
void BM_GiouMatrix(benchmark::State& state) {
  const auto a = boxes(static_cast<int>(state.range(0)), 3);
  const auto b = boxes(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(F(a, b));
}

template <int (*F)(std::uint64_t, std::span<const std::uint64_t>)>
void BM_MinHamming(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::vector<std::uint64_t> hashes(static_cast<std::size_t>(state.range(0)));
  for (auto& h : hashes) h = rng();
  const std::uint64_t q = rng();
  for (auto _ : state) benchmark::DoNotOptimize(F(q, hashes));
}

}  // namespace

BENCHMARK(BM_AreaDownscale<serial::area_downscale>)->Arg(1500)->Arg(4500);
BENCHMARK(BM_AreaDownscale<parallel::area_downscale>)->Arg(1500)->Arg(4500);
BENCHMARK(BM_Dct2<serial::dct2>)->Arg(32)->Arg(128);
BENCHMARK(BM_Dct2<parallel::dct2>)->Arg(32)->Arg(128);
BENCHMARK(BM_GiouMatrix<serial::giou_matrix>)->Arg(64)->Arg(512);
BENCHMARK(BM_GiouMatrix<parallel::giou_matrix>)->Arg(64)->Arg(512);
BENCHMARK(BM_MinHamming<serial::min_hamming>)->Arg(1000)->Arg(100000);
BENCHMARK(BM_MinHamming<parallel::min_hamming>)->Arg(1000)->Arg(100000);

BENCHMARK_MAIN();
