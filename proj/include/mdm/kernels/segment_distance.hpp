#pragma once

#include <cstddef>
#include <vector>

namespace mdm::kernels {

/// Segments in structure-of-arrays layout: start (ax, ay), direction
/// (ex, ey) = end - start, and 1 / |e|^2 (0 for degenerate segments).
/// Arrays are padded to a multiple of 4 with copies of the last segment so
/// vector loops need no tail handling.
struct SegmentSoA {
  std::vector<double> ax, ay, ex, ey, inv_len2;
  std::size_t count = 0;  // logical segment count (before padding)

  void clear();
  void push(double x0, double y0, double x1, double y1);
  /// Pads to a multiple of 4; call after the last push.
  void finalize();
  std::size_t padded() const { return ax.size(); }
};

/// Nearest segment to a query point: squared distance, index and clamped
/// projection parameter. Ties go to the smallest index.
struct NearestHit {
  double dist2 = 0.0;
  int index = -1;
  double t = 0.0;
};

enum class SimdLevel { Scalar, Avx2, Neon };

const char* to_string(SimdLevel level);

/// Instruction set chosen at first use: the best supported by the CPU, unless
/// the environment variable MDM_SIMD is set to "scalar".
SimdLevel active_level();
/// Whether a level can run on this machine.
bool level_available(SimdLevel level);

NearestHit nearest_segment(const SegmentSoA& segs, double px, double py);
NearestHit nearest_segment(const SegmentSoA& segs, double px, double py, SimdLevel level);

// Per-ISA implementations; only call those reported available.
NearestHit nearest_segment_scalar(const SegmentSoA& segs, double px, double py);
NearestHit nearest_segment_avx2(const SegmentSoA& segs, double px, double py);
NearestHit nearest_segment_neon(const SegmentSoA& segs, double px, double py);

}  // namespace mdm::kernels
