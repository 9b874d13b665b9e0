#include <algorithm>
#include <cstdlib>
#include <cstring>

#include "mdm/kernels/segment_distance.hpp"

namespace mdm::kernels {

void SegmentSoA::clear() {
  ax.clear(); ay.clear(); ex.clear(); ey.clear(); inv_len2.clear();
  count = 0;
}

void SegmentSoA::push(double x0, double y0, double x1, double y1) {
  ax.push_back(x0);
  ay.push_back(y0);
  ex.push_back(x1 - x0);
  ey.push_back(y1 - y0);
  const double l2 = (x1 - x0) * (x1 - x0) + (y1 - y0) * (y1 - y0);
  inv_len2.push_back(l2 > 0.0 ? 1.0 / l2 : 0.0);
  count = ax.size();
}

void SegmentSoA::finalize() {
  if (ax.empty()) return;
  while (ax.size() % 4 != 0) {
    ax.push_back(ax.back()); ay.push_back(ay.back());
    ex.push_back(ex.back()); ey.push_back(ey.back());
    inv_len2.push_back(inv_len2.back());
  }
}

// Reference implementation. The vector kernels evaluate the same expression
// tree operation by operation, so results agree bit for bit.
NearestHit nearest_segment_scalar(const SegmentSoA& s, double px, double py) {
  NearestHit best{__builtin_inf(), -1, 0.0};
  for (std::size_t i = 0; i < s.count; ++i) {
    const double qx = px - s.ax[i], qy = py - s.ay[i];
    double t = (qx * s.ex[i] + qy * s.ey[i]) * s.inv_len2[i];
    t = std::min(std::max(t, 0.0), 1.0);
    const double dx = qx - t * s.ex[i], dy = qy - t * s.ey[i];
    const double d2 = dx * dx + dy * dy;
    if (d2 < best.dist2) best = {d2, static_cast<int>(i), t};
  }
  return best;
}

const char* to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::Scalar: return "scalar";
    case SimdLevel::Avx2: return "avx2";
    case SimdLevel::Neon: return "neon";
  }
  return "unknown";
}

bool level_available(SimdLevel level) {
  switch (level) {
    case SimdLevel::Scalar: return true;
    case SimdLevel::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case SimdLevel::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

SimdLevel active_level() {
  static const SimdLevel level = [] {
    const char* env = std::getenv("MDM_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return SimdLevel::Scalar;
    if (level_available(SimdLevel::Avx2)) return SimdLevel::Avx2;
    if (level_available(SimdLevel::Neon)) return SimdLevel::Neon;
    return SimdLevel::Scalar;
  }();
  return level;
}

NearestHit nearest_segment(const SegmentSoA& segs, double px, double py, SimdLevel level) {
  switch (level) {
    case SimdLevel::Avx2: return nearest_segment_avx2(segs, px, py);
    case SimdLevel::Neon: return nearest_segment_neon(segs, px, py);
    case SimdLevel::Scalar: break;
  }
  return nearest_segment_scalar(segs, px, py);
}

NearestHit nearest_segment(const SegmentSoA& segs, double px, double py) {
  return nearest_segment(segs, px, py, active_level());
}

}  // namespace mdm::kernels
