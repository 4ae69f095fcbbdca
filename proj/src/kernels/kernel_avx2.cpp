// AVX2 variant of the batched game kernel: four strategies per pack, one per
// 64-bit lane. Explicit add/sub/mul/div intrinsics only, so each lane runs
// exactly the scalar arithmetic sequence (no FMA contraction) and results are
// bit-identical to batch_scalar.

#include "tennis/kernels/game_kernel.hpp"

#if defined(TENNIS_KERNEL_AVX2_COMPILED) && defined(__AVX2__)

#include <immintrin.h>

#include "game_eval.hpp"

namespace tennis::kernels {

void batch_scalar(const double* genomes, std::size_t n, KernelOutcome* out);

namespace {

struct Vec4d {
  __m256d v;
  static Vec4d broadcast(double x) { return {_mm256_set1_pd(x)}; }
  friend Vec4d operator+(Vec4d a, Vec4d b) { return {_mm256_add_pd(a.v, b.v)}; }
  friend Vec4d operator-(Vec4d a, Vec4d b) { return {_mm256_sub_pd(a.v, b.v)}; }
  friend Vec4d operator*(Vec4d a, Vec4d b) { return {_mm256_mul_pd(a.v, b.v)}; }
  friend Vec4d operator/(Vec4d a, Vec4d b) { return {_mm256_div_pd(a.v, b.v)}; }
};

}  // namespace

void batch_avx2(const double* genomes, std::size_t n, KernelOutcome* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* g0 = genomes + (i + 0) * 18;
    const double* g1 = genomes + (i + 1) * 18;
    const double* g2 = genomes + (i + 2) * 18;
    const double* g3 = genomes + (i + 3) * 18;
    Vec4d p[18];
    for (int k = 0; k < 18; ++k) p[k] = {_mm256_set_pd(g3[k], g2[k], g1[k], g0[k])};
    const auto r = detail::evaluate_game(p);
    alignas(32) double win[4], loss[4], points[4], avg[4];
    _mm256_store_pd(win, r.win.v);
    _mm256_store_pd(loss, r.loss.v);
    _mm256_store_pd(points, r.points.v);
    _mm256_store_pd(avg, r.induced_avg.v);
    for (int lane = 0; lane < 4; ++lane) {
      out[i + static_cast<std::size_t>(lane)] = {win[lane], loss[lane], points[lane], avg[lane]};
    }
  }
  if (i < n) batch_scalar(genomes + i * 18, n - i, out + i);
}

}  // namespace tennis::kernels

#endif  // TENNIS_KERNEL_AVX2_COMPILED && __AVX2__
