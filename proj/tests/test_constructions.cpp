#include <gtest/gtest.h>

#include <cmath>

#include "mdm/constructions.hpp"
#include "mdm/coverage.hpp"
#include "mdm/errors.hpp"

using namespace mdm;

TEST(Horseshoe, CircleMatchesClosedForm) {
  // Circle R = 5, r = 1: tangent length sqrt(25 - 16) = 3 from the gap
  // centre, far arc of M_r spanning 2pi - 2 acos(4/5).
  const ConvexCurve c = ConvexCurve::circle({0, 0}, 5.0);
  const Horseshoe h = build_horseshoe(c, 1.0);
  const double oracle = 4.0 * (kTwoPi - 2.0 * std::acos(0.8)) + 2.0 * (3.0 - 1.0);
  EXPECT_NEAR(h.length, oracle, 1e-9);
  EXPECT_NEAR(h.length, 23.984732, 1e-6);
  EXPECT_NEAR(total_length(h.net), h.length, 1e-9);
  EXPECT_EQ(h.net.arc_count(), 1);
  EXPECT_EQ(h.net.segment_count(), 2);
  const int n = 8192;
  EXPECT_LE(max_distance_functional(c, h.net, n).value, 1.0 + c.perimeter() / n);
  for (const Point2& t : h.tips) EXPECT_NEAR(distance(t, h.gap_center), 1.0, 1e-12);
}

TEST(Horseshoe, EllipseIsMinimalOverGapPositions) {
  const ConvexCurve e = ConvexCurve::ellipse({0, 0}, 6.0, 4.0);
  const Horseshoe h = build_horseshoe(e, 1.0);
  EXPECT_TRUE(check_structure(h.net).ok());
  const int n = 8192;
  EXPECT_LE(max_distance_functional(e, h.net, n).value, 1.0 + e.perimeter() / n);
  for (int k = 0; k < 97; ++k) EXPECT_GE(horseshoe_at(e, 1.0, e.perimeter() * k / 97).length, h.length - 1e-9);
  // The tips' segments are tangent to M_r at the tangency points.
  for (int i = 0; i < 2; ++i) {
    const Vec2 seg = normalized(h.tangency[static_cast<std::size_t>(i)] - h.tips[static_cast<std::size_t>(i)]);
    const Point2 q = h.tangency[static_cast<std::size_t>(i)];
    const Vec2 nrm = normalized(e.project(q).point - q);
    EXPECT_NEAR(dot(seg, nrm), 0.0, 1e-6);
    EXPECT_NEAR(e.project(q).distance, 1.0, 1e-6);
  }
}

TEST(Horseshoe, RejectsLargeRadius) {
  EXPECT_THROW(build_horseshoe(ConvexCurve::ellipse({0, 0}, 6.0, 4.0), 3.0), CurvatureViolation);
}

TEST(Rectangle, SeedTopology) {
  const RectangleNet R = build_rectangle_net(16.0, 9.0, 0.25, false);
  EXPECT_EQ(R.net.segment_count(), 21);
  EXPECT_EQ(R.net.arc_count(), 0);
  EXPECT_TRUE(check_structure(R.net).ok());
  EXPECT_THROW(build_rectangle_net(16.0, 9.0, 1.0, false), RadiusTooLarge);
}

TEST(Rectangle, RefinedNetworkCoversWithSteinerAngles) {
  const RectangleNet R = build_rectangle_net(16.0, 9.0, 0.25, true);
  const ConvexCurve c = ConvexCurve::rectangle({0, 0}, 16.0, 9.0);
  EXPECT_EQ(R.net.segment_count(), 21);
  EXPECT_LE(max_distance_functional(c, R.net, 32768).value, 0.25 * (1.0 + 1e-5));
  EXPECT_NEAR(R.constant, (50.0 - total_length(R.net)) / 0.25, 1e-9);
  const AngleReport a = angle_report(R.net);
  EXPECT_LT(a.max_tripod_deviation, 1e-3);
  EXPECT_GT(R.constant, 8.0);
  EXPECT_LT(R.constant, 9.0);
}

TEST(Stadium, CellBelowThreshold) {
  const StadiumCell cell = build_stadium_cell(1.5, 1.0);
  EXPECT_FALSE(cell.runaway);
  EXPECT_LT(cell.c, 2.0);
  EXPECT_NEAR(cell.c, cell.cell_length / cell.advance, 1e-12);
  EXPECT_NEAR(total_length(cell.net), cell.cell_length, 1e-9);
  // Junctions with arms of positive length hold exact Steiner angles. At
  // this ratio the top tripod has collapsed onto its stem.
  int junctions = 0;
  for (int v = 0; v < cell.net.vertex_count(); ++v) {
    if (cell.net.degree(v) != 3) continue;
    const auto& inc = cell.net.incidence()[static_cast<std::size_t>(v)];
    bool degenerate = false;
    for (int e : inc) degenerate = degenerate || cell.net.edge_length(e) < 1e-9;
    if (degenerate) continue;
    ++junctions;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        EXPECT_NEAR(angle_between(cell.net.leaving_direction(inc[i], v), cell.net.leaving_direction(inc[j], v)), 2 * kPi / 3,
                    1e-9);
  }
  EXPECT_GE(junctions, 1);
  EXPECT_NEAR(distance(cell.net.vertex(cell.b), cell.net.vertex(cell.a) + Vec2{cell.advance, 0.0}), 0.0, 1e-12);
  EXPECT_THROW(build_stadium_cell(1.0, 1.0), InvalidRatio);
}

TEST(Stadium, ShortStraightPartHasNoCompetitor) {
  const ComparisonReport rep = compare_stadium(0.5, 1.5, 1.0, 1024);
  EXPECT_EQ(rep.cells, 0);
  EXPECT_EQ(rep.winner, "horseshoe");
  EXPECT_FALSE(rep.caveat.empty());
  EXPECT_TRUE(std::isinf(rep.competitor_length));
}
