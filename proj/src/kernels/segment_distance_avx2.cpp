#include "mdm/kernels/segment_distance.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace mdm::kernels {

// Four segments per iteration. Each lane keeps its own running minimum; lanes
// are merged at the end with the scalar tie rule (smallest index wins).
__attribute__((target("avx2"))) NearestHit nearest_segment_avx2(const SegmentSoA& s, double px, double py) {
  NearestHit best{__builtin_inf(), -1, 0.0};
  if (s.count == 0) return best;
  const __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py);
  const __m256d zero = _mm256_setzero_pd(), one = _mm256_set1_pd(1.0), four = _mm256_set1_pd(4.0);
  __m256d best_d2 = _mm256_set1_pd(__builtin_inf());
  __m256d best_idx = _mm256_set1_pd(-1.0);
  __m256d best_t = zero;
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const std::size_t n = s.padded();
  for (std::size_t i = 0; i < n; i += 4) {
    const __m256d ax = _mm256_loadu_pd(&s.ax[i]), ay = _mm256_loadu_pd(&s.ay[i]);
    const __m256d ex = _mm256_loadu_pd(&s.ex[i]), ey = _mm256_loadu_pd(&s.ey[i]);
    const __m256d il = _mm256_loadu_pd(&s.inv_len2[i]);
    const __m256d qx = _mm256_sub_pd(vpx, ax), qy = _mm256_sub_pd(vpy, ay);
    __m256d t = _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(qx, ex), _mm256_mul_pd(qy, ey)), il);
    t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
    const __m256d dx = _mm256_sub_pd(qx, _mm256_mul_pd(t, ex));
    const __m256d dy = _mm256_sub_pd(qy, _mm256_mul_pd(t, ey));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const __m256d lt = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
    best_d2 = _mm256_blendv_pd(best_d2, d2, lt);
    best_idx = _mm256_blendv_pd(best_idx, idx, lt);
    best_t = _mm256_blendv_pd(best_t, t, lt);
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double d[4], ix[4], tt[4];
  _mm256_store_pd(d, best_d2);
  _mm256_store_pd(ix, best_idx);
  _mm256_store_pd(tt, best_t);
  for (int l = 0; l < 4; ++l) {
    const int k = static_cast<int>(ix[l]);
    if (k < 0 || static_cast<std::size_t>(k) >= s.count) continue;
    if (d[l] < best.dist2 || (d[l] == best.dist2 && k < best.index)) best = {d[l], k, tt[l]};
  }
  return best;
}

}  // namespace mdm::kernels

#else

namespace mdm::kernels {
NearestHit nearest_segment_avx2(const SegmentSoA& s, double px, double py) { return nearest_segment_scalar(s, px, py); }
}  // namespace mdm::kernels

#endif
