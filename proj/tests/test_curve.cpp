#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdm/curve.hpp"
#include "mdm/errors.hpp"

using namespace mdm;

namespace {

// Composite Simpson on the ellipse speed, independent of the curve tables.
double ellipse_perimeter(double a, double b) {
  const int n = 200000;
  auto speed = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
  double s = speed(0.0) + speed(kTwoPi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * speed(kTwoPi * i / n);
  return s * kTwoPi / n / 3.0;
}

double brute_distance(const ConvexCurve& c, Point2 p, int n = 100000) {
  double best = 1e300;
  for (const Point2& q : c.samples(n)) best = std::min(best, distance(p, q));
  return best;
}

}  // namespace

TEST(Curve, Perimeters) {
  EXPECT_NEAR(ConvexCurve::circle({1.0, 2.0}, 5.0).perimeter(), 10.0 * kPi, 1e-12);
  EXPECT_NEAR(ConvexCurve::stadium({0.0, 0.0}, 40.0, 1.5).perimeter(), 80.0 + 3.0 * kPi, 1e-12);
  EXPECT_NEAR(ConvexCurve::rectangle({0.0, 0.0}, 16.0, 9.0).perimeter(), 50.0, 1e-12);
  EXPECT_NEAR(ConvexCurve::ellipse({0.0, 0.0}, 6.0, 4.0).perimeter(), ellipse_perimeter(6.0, 4.0), 1e-7);
}

TEST(Curve, ArclengthParametrization) {
  for (const ConvexCurve& c : {ConvexCurve::circle({0, 0}, 3.0), ConvexCurve::stadium({0, 0}, 4.0, 1.0),
                               ConvexCurve::ellipse({0, 0}, 6.0, 4.0), ConvexCurve::rectangle({0, 0}, 2.0, 1.0)}) {
    // Corners of the 2 x 1 rectangle fall on the lattice.
    const int n = 24000;
    const double h = c.perimeter() / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += distance(c.point(i * h), c.point((i + 1) * h));
    EXPECT_NEAR(total, c.perimeter(), 1e-5 * c.perimeter()) << to_string(c.kind());
    EXPECT_NEAR(distance(c.point(0.0), c.point(c.perimeter())), 0.0, 1e-9);
  }
}

TEST(Curve, TangentsAreUnitAndCounterclockwise) {
  const ConvexCurve c = ConvexCurve::ellipse({0, 0}, 6.0, 4.0);
  for (double s = 0.0; s < c.perimeter(); s += 0.7) {
    const auto f = c.frame(s);
    EXPECT_NEAR(f.tangent.norm(), 1.0, 1e-12);
    const Vec2 fd = (c.point(s + 1e-5) - c.point(s - 1e-5)) / 2e-5;
    EXPECT_NEAR(fd.x, f.tangent.x, 1e-6);
    EXPECT_NEAR(fd.y, f.tangent.y, 1e-6);
    EXPECT_TRUE(c.contains(f.point + f.inward_normal() * 0.1));
  }
}

TEST(Curve, CurvatureRadius) {
  EXPECT_NEAR(ConvexCurve::circle({0, 0}, 5.0).min_curvature_radius(), 5.0, 1e-12);
  EXPECT_NEAR(ConvexCurve::ellipse({0, 0}, 6.0, 4.0).min_curvature_radius(), 16.0 / 6.0, 1e-6);
  EXPECT_NEAR(ConvexCurve::stadium({0, 0}, 10.0, 2.0).min_curvature_radius(), 2.0, 1e-12);
  EXPECT_FALSE(ConvexCurve::rectangle({0, 0}, 2.0, 1.0).is_smooth());
}

TEST(Curve, RectangleCorners) {
  const ConvexCurve c = ConvexCurve::rectangle({0, 0}, 16.0, 9.0);
  const auto k = c.corner_params();
  ASSERT_EQ(k.size(), 4u);
  EXPECT_NEAR(distance(c.point(k[1]), Point2{16.0, 0.0}), 0.0, 1e-12);
  EXPECT_NEAR(distance(c.point(k[2]), Point2{16.0, 9.0}), 0.0, 1e-12);
  EXPECT_TRUE(c.near_corner(41.0 + 1e-7, 1e-6));
  EXPECT_FALSE(c.near_corner(20.0, 1e-6));
}

TEST(Curve, ProjectionMatchesSampling) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-7.0, 7.0);
  for (const ConvexCurve& c : {ConvexCurve::ellipse({0, 0}, 6.0, 4.0), ConvexCurve::stadium({0, 0}, 4.0, 2.0),
                               ConvexCurve::rectangle({-5, -3}, 10.0, 6.0)}) {
    for (int i = 0; i < 25; ++i) {
      const Point2 p{U(rng), U(rng)};
      const auto pr = c.project(p);
      EXPECT_NEAR(pr.distance, brute_distance(c, p), 1e-3) << to_string(c.kind());
      EXPECT_NEAR(distance(c.point(pr.s), pr.point), 0.0, 1e-8);
    }
  }
}

TEST(Curve, InnerOffsetOfEllipse) {
  const ConvexCurve e = ConvexCurve::ellipse({0, 0}, 6.0, 4.0);
  const OffsetCurve off = inner_offset(e, 1.0, 256);
  const std::vector<Point2> dense = e.samples(200000);
  for (const Point2& q : off.samples) {
    double best = 1e300;
    for (const Point2& p : dense) best = std::min(best, distance(p, q));
    EXPECT_NEAR(best, 1.0, 1e-6);
  }
  EXPECT_NEAR(inner_offset(ConvexCurve::circle({0, 0}, 5.0), 1.0).curve.perimeter(), 8.0 * kPi, 1e-12);
}

TEST(Curve, InnerOffsetRejectsLargeRadius) {
  EXPECT_THROW(inner_offset(ConvexCurve::ellipse({0, 0}, 6.0, 4.0), 2.7), CurvatureViolation);
  EXPECT_THROW(inner_offset(ConvexCurve::rectangle({0, 0}, 2.0, 1.0), 0.1), CurvatureViolation);
}

TEST(Curve, SampledPolygonApproximatesCircle) {
  std::vector<Point2> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back(from_polar(2.0, kTwoPi * i / 2000));
  const ConvexCurve c = ConvexCurve::sampled(pts);
  EXPECT_NEAR(c.perimeter(), 4.0 * kPi, 1e-4);
  EXPECT_TRUE(c.contains({0.0, 0.0}));
  EXPECT_FALSE(c.contains({2.1, 0.0}));
}

TEST(Curve, InvalidParameters) {
  EXPECT_THROW(ConvexCurve::circle({0, 0}, -1.0), Error);
  EXPECT_THROW(ConvexCurve::rectangle({0, 0}, 0.0, 1.0), Error);
}
