#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdm/geometry.hpp"
#include "mdm/kernels/segment_distance.hpp"

using namespace mdm;
using namespace mdm::kernels;

namespace {

SegmentSoA random_segments(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  SegmentSoA s;
  for (int i = 0; i < n; ++i) {
    const double x = U(rng), y = U(rng);
    // Some degenerate and some axis-aligned segments.
    if (i % 17 == 0) s.push(x, y, x, y);
    else if (i % 13 == 0) s.push(x, y, x + 1.0, y);
    else s.push(x, y, U(rng), U(rng));
  }
  s.finalize();
  return s;
}

}  // namespace

TEST(Kernels, ScalarMatchesDirectProjection) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-12.0, 12.0);
  std::vector<std::array<double, 4>> raw;
  SegmentSoA s;
  for (int i = 0; i < 57; ++i) {
    std::array<double, 4> r{U(rng), U(rng), U(rng), U(rng)};
    raw.push_back(r);
    s.push(r[0], r[1], r[2], r[3]);
  }
  s.finalize();
  for (int k = 0; k < 300; ++k) {
    const Point2 p{U(rng), U(rng)};
    double best = 1e300;
    for (const auto& r : raw) best = std::min(best, closest_on_segment(p, {r[0], r[1]}, {r[2], r[3]}).distance);
    const NearestHit h = nearest_segment_scalar(s, p.x, p.y);
    EXPECT_NEAR(std::sqrt(h.dist2), best, 1e-12);
    ASSERT_GE(h.index, 0);
    ASSERT_LT(h.index, 57);
  }
}

TEST(Kernels, VectorLevelsMatchScalarExactly) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-12.0, 12.0);
  for (SimdLevel level : {SimdLevel::Avx2, SimdLevel::Neon}) {
    if (!level_available(level)) continue;
    for (int n : {1, 3, 4, 5, 8, 31, 200}) {
      const SegmentSoA s = random_segments(rng, n);
      for (int k = 0; k < 400; ++k) {
        const double x = U(rng), y = U(rng);
        const NearestHit a = nearest_segment_scalar(s, x, y);
        const NearestHit b = nearest_segment(s, x, y, level);
        EXPECT_EQ(a.dist2, b.dist2) << to_string(level) << " n=" << n;
        EXPECT_EQ(a.index, b.index);
        EXPECT_EQ(a.t, b.t);
      }
    }
  }
}

TEST(Kernels, TiesResolveToLowestIndex) {
  SegmentSoA s;
  for (int i = 0; i < 9; ++i) s.push(-1.0, 1.0, 1.0, 1.0);
  s.finalize();
  for (SimdLevel level : {SimdLevel::Scalar, SimdLevel::Avx2, SimdLevel::Neon}) {
    if (!level_available(level)) continue;
    EXPECT_EQ(nearest_segment(s, 0.0, 0.0, level).index, 0) << to_string(level);
  }
}

TEST(Kernels, ActiveLevelIsAvailable) {
  EXPECT_TRUE(level_available(active_level()));
  EXPECT_TRUE(level_available(SimdLevel::Scalar));
}

TEST(Kernels, EmptySet) {
  SegmentSoA s;
  s.finalize();
  EXPECT_EQ(nearest_segment(s, 0.0, 0.0).index, -1);
}
