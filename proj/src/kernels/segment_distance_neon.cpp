#include "mdm/kernels/segment_distance.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace mdm::kernels {

// Two lanes per vector, two vectors per iteration (the SoA padding is to 4).
NearestHit nearest_segment_neon(const SegmentSoA& s, double px, double py) {
  NearestHit best{__builtin_inf(), -1, 0.0};
  if (s.count == 0) return best;
  const float64x2_t vpx = vdupq_n_f64(px), vpy = vdupq_n_f64(py);
  const float64x2_t zero = vdupq_n_f64(0.0), one = vdupq_n_f64(1.0), two = vdupq_n_f64(2.0);
  float64x2_t best_d2 = vdupq_n_f64(__builtin_inf()), best_idx = vdupq_n_f64(-1.0), best_t = zero;
  const double init[2] = {0.0, 1.0};
  float64x2_t idx = vld1q_f64(init);
  const std::size_t n = s.padded();
  for (std::size_t i = 0; i < n; i += 2) {
    const float64x2_t qx = vsubq_f64(vpx, vld1q_f64(&s.ax[i]));
    const float64x2_t qy = vsubq_f64(vpy, vld1q_f64(&s.ay[i]));
    const float64x2_t ex = vld1q_f64(&s.ex[i]), ey = vld1q_f64(&s.ey[i]);
    float64x2_t t = vmulq_f64(vaddq_f64(vmulq_f64(qx, ex), vmulq_f64(qy, ey)), vld1q_f64(&s.inv_len2[i]));
    t = vminq_f64(vmaxq_f64(t, zero), one);
    const float64x2_t dx = vsubq_f64(qx, vmulq_f64(t, ex));
    const float64x2_t dy = vsubq_f64(qy, vmulq_f64(t, ey));
    const float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    const uint64x2_t lt = vcltq_f64(d2, best_d2);
    best_d2 = vbslq_f64(lt, d2, best_d2);
    best_idx = vbslq_f64(lt, idx, best_idx);
    best_t = vbslq_f64(lt, t, best_t);
    idx = vaddq_f64(idx, two);
  }
  double d[2], ix[2], tt[2];
  vst1q_f64(d, best_d2);
  vst1q_f64(ix, best_idx);
  vst1q_f64(tt, best_t);
  for (int l = 0; l < 2; ++l) {
    const int k = static_cast<int>(ix[l]);
    if (k < 0 || static_cast<std::size_t>(k) >= s.count) continue;
    if (d[l] < best.dist2 || (d[l] == best.dist2 && k < best.index)) best = {d[l], k, tt[l]};
  }
  return best;
}

}  // namespace mdm::kernels

#else

namespace mdm::kernels {
NearestHit nearest_segment_neon(const SegmentSoA& s, double px, double py) { return nearest_segment_scalar(s, px, py); }
}  // namespace mdm::kernels

#endif
