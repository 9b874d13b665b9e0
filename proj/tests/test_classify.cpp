#include <gtest/gtest.h>

#include <cmath>

#include "mdm/classify.hpp"
#include "mdm/constructions.hpp"
#include "mdm/errors.hpp"

using namespace mdm;

TEST(Classify, HorseshoeTipsSeeTheGapCentre) {
  const ConvexCurve c = ConvexCurve::circle({0, 0}, 5.0);
  const Horseshoe h = build_horseshoe(c, 1.0);
  const auto recs = classify_points(h.net, c, 1.0);
  int tips = 0;
  for (const EnergeticRecord& rec : recs) {
    if (rec.vertex < 0 || rec.degree != 1) continue;
    ++tips;
    EXPECT_EQ(rec.cls, PointClass::Energetic);
    ASSERT_EQ(rec.corresponding.size(), 1u);
    EXPECT_NEAR(distance(rec.corresponding[0].y, h.gap_center), 0.0, 1e-6);
    EXPECT_NEAR(distance(rec.x, h.gap_center), 1.0, 1e-9);
    EXPECT_EQ(rec.case_id, std::optional<int>(1));
  }
  EXPECT_EQ(tips, 2);
}

TEST(Classify, HorseshoeArcIsOnOffset) {
  const ConvexCurve c = ConvexCurve::circle({0, 0}, 5.0);
  const Horseshoe h = build_horseshoe(c, 1.0);
  int arcs = 0;
  for (int e = 0; e < h.net.edge_count(); ++e)
    if (h.net.edge(e).kind == EdgeKind::Arc) {
      ++arcs;
      EXPECT_TRUE(arc_is_all_energetic(h.net, e, c, 1.0, 1e-6));
    }
  EXPECT_EQ(arcs, 1);
}

TEST(Classify, InteriorPointIsSteiner) {
  // A segment through the middle of a big circle: nothing touches a ball.
  const ConvexCurve c = ConvexCurve::circle({0, 0}, 5.0);
  const Network n({{-4.9, 0}, {4.9, 0}}, {Edge::segment(0, 1)});
  EXPECT_THROW(classify_points(n, c, 1.0), CoverageViolation);
  EXPECT_TRUE(find_corresponding(n, c, 1.0, {0.0, 0.0}, 1e-6).empty());
}

TEST(Classify, CorrespondingPointsOfDiameterEnd) {
  // x = (4, 0) on a segment along the x axis: y = (5, 0) is at distance 1
  // and its nearest network point is x itself.
  const ConvexCurve c = ConvexCurve::circle({0, 0}, 5.0);
  const Network n({{-4, 0}, {4, 0}}, {Edge::segment(0, 1)});
  const auto cp = find_corresponding(n, c, 1.0, {4.0, 0.0}, 1e-6);
  ASSERT_EQ(cp.size(), 1u);
  EXPECT_NEAR(distance(cp[0].y, {5.0, 0.0}), 0.0, 1e-6);
  EXPECT_TRUE(cp[0].smooth);
}

TEST(Classify, RectangleCornersAreFound) {
  // Corner contacts are isolated local maxima of the clearance; they must
  // be detected as non-smooth corresponding points.
  const RectangleNet R = build_rectangle_net(16.0, 9.0, 0.25, false);
  const ConvexCurve c = ConvexCurve::rectangle({0, 0}, 16.0, 9.0);
  const std::array<Point2, 4> corners{Point2{0, 0}, Point2{16, 0}, Point2{16, 9}, Point2{0, 9}};
  std::array<int, 4> hits{};
  for (const EnergeticRecord& rec : classify_points(R.net, c, 0.25))
    for (const CorrespondingPoint& y : rec.corresponding)
      for (int k = 0; k < 4; ++k)
        if (distance(y.y, corners[k]) < 1e-6) {
          ++hits[k];
          EXPECT_FALSE(y.smooth);
          EXPECT_FALSE(rec.case_id.has_value());
        }
  for (int k = 0; k < 4; ++k) EXPECT_GE(hits[k], 1) << "corner " << k;
}
