#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdm/errors.hpp"
#include "mdm/steiner.hpp"

using namespace mdm;

namespace {

// Fermat point by Weiszfeld iteration, independent of the library.
Point2 weiszfeld(const std::vector<Point2>& p) {
  Point2 x{0, 0};
  for (const Point2& q : p) x += q / static_cast<double>(p.size());
  for (int it = 0; it < 100000; ++it) {
    Vec2 num{0, 0};
    double den = 0.0;
    for (const Point2& q : p) {
      const double d = std::max(distance(x, q), 1e-300);
      num += q / d;
      den += 1.0 / d;
    }
    x = num / den;
  }
  return x;
}

// Full Steiner topology of the unit square with two Steiner points joined by
// a horizontal bridge; minimized over the four Steiner coordinates by
// coordinate-free gradient descent with backtracking.
double square_oracle() {
  const std::array<Point2, 4> t{Point2{0, 0}, Point2{0, 1}, Point2{1, 0}, Point2{1, 1}};
  auto L = [&](Point2 s1, Point2 s2) {
    return distance(s1, t[0]) + distance(s1, t[1]) + distance(s1, s2) + distance(s2, t[2]) + distance(s2, t[3]);
  };
  Point2 s1{0.3, 0.5}, s2{0.7, 0.5};
  double step = 0.1;
  for (int it = 0; it < 200000 && step > 1e-18; ++it) {
    const double h = 1e-7;
    const Vec2 g1{(L(s1 + Vec2{h, 0}, s2) - L(s1 - Vec2{h, 0}, s2)) / (2 * h),
                  (L(s1 + Vec2{0, h}, s2) - L(s1 - Vec2{0, h}, s2)) / (2 * h)};
    const Vec2 g2{(L(s1, s2 + Vec2{h, 0}) - L(s1, s2 - Vec2{h, 0})) / (2 * h),
                  (L(s1, s2 + Vec2{0, h}) - L(s1, s2 - Vec2{0, h})) / (2 * h)};
    const double cur = L(s1, s2);
    if (L(s1 - g1 * step, s2 - g2 * step) < cur) {
      s1 -= g1 * step;
      s2 -= g2 * step;
      step *= 1.2;
    } else {
      step *= 0.5;
    }
  }
  return L(s1, s2);
}

Network tripod_at(Point2 o, double base, std::array<double, 3> len) {
  std::vector<Point2> v{o};
  for (int k = 0; k < 3; ++k) v.push_back(o + from_polar(len[k], base + k * 2 * kPi / 3));
  return Network(v, {Edge::segment(0, 1), Edge::segment(0, 2), Edge::segment(0, 3)});
}

}  // namespace

TEST(WindRose, AdjacencyLaw) {
  const WindRose w = make_wind_rose(0.3, 1.0, 2.5);
  EXPECT_NEAR(w.adjacency_residual(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(w.weights[2], 1.5);
  EXPECT_DOUBLE_EQ(w.weights[3], -1.0);
  EXPECT_DOUBLE_EQ(w.weights[4], -2.5);
  EXPECT_DOUBLE_EQ(w.weights[5], -1.5);
  EXPECT_EQ(w.ray_of(from_polar(1.0, 0.3 + kPi)), std::optional<int>(3));
  EXPECT_FALSE(w.ray_of(from_polar(1.0, 0.3 + 0.1)).has_value());
}

TEST(WindRose, TripodLeafSumIsZero) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.2, 3.0), A(0.0, kTwoPi);
  for (int k = 0; k < 50; ++k) {
    const double base = A(rng);
    const PseudoNetwork p(tripod_at({U(rng), U(rng)}, base, {U(rng), U(rng), U(rng)}));
    const WindRose w = make_wind_rose(base, U(rng) - 1.5, U(rng) - 1.5);
    ASSERT_TRUE(parallel_to_rose(p, w));
    EXPECT_NEAR(condition_ii_residual(p, w), 0.0, 1e-12);
    EXPECT_NEAR(leaf_weight_sum(p, w), 0.0, 1e-12);
    EXPECT_EQ(rotations_satisfying_ii(p, w), 6);
  }
}

TEST(WindRose, PerturbedEdgeIsNotParallel) {
  Network n = tripod_at({0, 0}, 0.0, {1, 1, 1});
  std::vector<Point2> v = n.vertices();
  v[1] = from_polar(1.0, 5.0 * kPi / 180.0);
  const PseudoNetwork p(Network(v, n.edges()));
  const WindRose w = make_wind_rose(0.0, 1.0, 1.0);
  EXPECT_FALSE(parallel_to_rose(p, w));
  EXPECT_THROW(leaf_weight_sum(p, w), NotParallel);
}

TEST(StLine, TripodAgainstLines) {
  const PseudoNetwork p(tripod_at({0, 0}, kPi / 2, {1, 1, 1}));
  // Horizontal line through the two lower leaves: 2 on, 1 off, equality.
  const double y = std::sin(kPi / 2 + 2 * kPi / 3);
  const StlResult a = check_St_l(p, {{0.0, y}, {1.0, 0.0}});
  EXPECT_EQ(a.count_on, 2);
  EXPECT_EQ(a.count_off, 1);
  EXPECT_TRUE(a.holds);
  EXPECT_TRUE(a.equality);
  EXPECT_TRUE(a.one_side);
  ASSERT_TRUE(a.collinearity.has_value());
  // Line far away: nothing on it.
  const StlResult b = check_St_l(p, {{0.0, 10.0}, {1.0, 0.0}});
  EXPECT_EQ(b.count_on, 0);
  EXPECT_TRUE(b.holds);
  EXPECT_THROW(check_St_l(p, {{0.0, 0.0}, {0.0, 0.0}}), DegenerateLine);
}

TEST(StLine, WholeNetworkOnLineIsDegenerate) {
  const PseudoNetwork p(Network({{0, 0}, {1, 0}}, {Edge::segment(0, 1)}));
  EXPECT_THROW(check_St_l(p, {{0, 0}, {1, 0}}), DegenerateLine);
}

TEST(ExactSteiner, EquilateralTriangle) {
  const std::vector<Point2> t{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  const Network n = exact_steiner_small(t);
  EXPECT_NEAR(total_length(n), std::sqrt(3.0), 1e-8);
  const Point2 f = weiszfeld(t);
  double oracle = 0.0;
  for (const Point2& q : t) oracle += distance(f, q);
  EXPECT_NEAR(total_length(n), oracle, 1e-10);
  EXPECT_TRUE(validate_local_steiner(n, t).ok());
}

TEST(ExactSteiner, UnitSquare) {
  const std::vector<Point2> t{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Network n = exact_steiner_small(t);
  EXPECT_NEAR(total_length(n), 1.0 + std::sqrt(3.0), 1e-8);
  EXPECT_NEAR(total_length(n), square_oracle(), 1e-8);
  EXPECT_TRUE(validate_local_steiner(n, t).ok());
}

TEST(ExactSteiner, ObtuseTriangleUsesTheObtuseVertex) {
  // Angle above 2pi/3 at the origin: the tree is the two sides at it.
  const std::vector<Point2> t{{0, 0}, {1, 0}, {std::cos(2.3), std::sin(2.3)}};
  EXPECT_NEAR(total_length(exact_steiner_small(t)), 2.0, 1e-10);
}

TEST(ExactSteiner, BoundedByMst) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 60; ++k) {
    std::vector<Point2> t;
    const int n = 2 + k % 4;
    for (int i = 0; i < n; ++i) t.push_back({U(rng), U(rng)});
    const double mst = mst_length(t);
    const double smt = total_length(exact_steiner_small(t));
    EXPECT_LE(smt, mst + 1e-12);
    EXPECT_GE(smt, std::sqrt(3.0) / 2.0 * mst - 1e-12);
  }
}

TEST(ExactSteiner, RejectsBadCounts) {
  EXPECT_THROW(exact_steiner_small({{0, 0}}), Error);
  EXPECT_THROW(exact_steiner_small({{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 2}}), TooManyTerminals);
}

TEST(Validate, TShapeFails) {
  const Network n({{0, 0}, {-1, 0}, {1, 0}, {0, 1}}, {Edge::segment(0, 1), Edge::segment(0, 2), Edge::segment(0, 3)});
  const ValidationReport r = validate_local_steiner(n, {{-1, 0}, {1, 0}, {0, 1}});
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.angles);
  EXPECT_NEAR(r.min_angle, kPi / 2, 1e-12);
}

TEST(Validate, TerminalOffNetwork) {
  const Network n({{0, 0}, {1, 0}}, {Edge::segment(0, 1)});
  EXPECT_FALSE(validate_local_steiner(n, {{0, 0}, {2, 0}}).terminals);
}

TEST(FullComponents, SplitsAtInteriorTerminal) {
  // Path a - t - b with t a terminal of degree 2.
  const Network n({{0, 0}, {1, 0}, {2, 0.5}}, {Edge::segment(0, 1), Edge::segment(1, 2)});
  const auto parts = full_components(n, 3);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_NEAR(total_length(parts[0]) + total_length(parts[1]), total_length(n), 1e-14);
}

TEST(CutByLine, TripodAcrossALine) {
  const Network t = tripod_at({0, 0}, kPi / 2, {1, 1, 1});
  const auto pieces = cut_by_line(t, {{0.0, -0.25}, {1.0, 0.0}});
  double total = 0.0;
  for (const Network& p : pieces) total += total_length(p);
  EXPECT_NEAR(total, total_length(t), 1e-12);
  EXPECT_EQ(pieces.size(), 3u);
}
