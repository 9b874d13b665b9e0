#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdm/coverage.hpp"
#include "mdm/errors.hpp"
#include "mdm/optimizer.hpp"

using namespace mdm;

namespace {

double max_gradient_error(PenaltyObjective& obj, std::vector<double> th) {
  std::vector<double> g;
  obj.value(th, &g);
  double worst = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double h = 1e-6, keep = th[i];
    th[i] = keep + h;
    const double fp = obj.value(th, nullptr);
    th[i] = keep - h;
    const double fm = obj.value(th, nullptr);
    th[i] = keep;
    const double fd = (fp - fm) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

// Open polygon through M_r of the circle R = 5, r = 1 from the tip at angle
// -gap to the tip at +gap, going the long way round.
Network polygonal_horseshoe(int n) {
  const double a0 = std::acos(0.8);  // tangency angle seen from (5, 0)
  std::vector<Point2> v;
  std::vector<Edge> e;
  const Point2 y0{5.0, 0.0};
  const Point2 ta = from_polar(4.0, a0), tb = from_polar(4.0, -a0);
  v.push_back(y0 + normalized(ta - y0));
  const double step = (kTwoPi - 2 * a0) / n;
  for (int k = 0; k <= n; ++k) {
    const double rad = k == 0 || k == n ? 4.0 : 4.0 / std::cos(0.5 * step);
    v.push_back(from_polar(rad, a0 + step * k));
  }
  v.push_back(y0 + normalized(tb - y0));
  for (int i = 0; i + 1 < static_cast<int>(v.size()); ++i) e.push_back(Edge::segment(i, i + 1));
  return Network(v, e);
}

}  // namespace

TEST(Optimizer, FermatPoint) {
  OptimizationProblem pb;
  pb.net = Network({{0, 0}, {4, 0}, {1, 3}, {1.5, 1.5}}, {Edge::segment(0, 3), Edge::segment(1, 3), Edge::segment(2, 3)});
  pb.controls.assign(4, {VertexMode::Pinned});
  pb.controls[3].mode = VertexMode::Free;
  const OptimizationResult res = minimize_length(pb);
  // Weiszfeld oracle.
  const std::array<Point2, 3> t{Point2{0, 0}, Point2{4, 0}, Point2{1, 3}};
  Point2 x{1.5, 1.5};
  for (int it = 0; it < 20000; ++it) {
    Vec2 num{};
    double den = 0.0;
    for (const Point2& q : t) {
      num += q / distance(x, q);
      den += 1.0 / distance(x, q);
    }
    x = num / den;
  }
  EXPECT_NEAR(distance(res.net.vertex(3), x), 0.0, 1e-6);
  EXPECT_NEAR(angle_report(res.net, {0, 1, 2}).max_tripod_deviation, 0.0, 1e-5);
}

TEST(Optimizer, GradientMatchesFiniteDifferencesOnCurve) {
  OptimizationProblem pb;
  pb.curve = ConvexCurve::ellipse({0, 0}, 6.0, 4.0);
  pb.r = 1.0;
  pb.net = Network({{-4.2, 0.3}, {0.1, 2.7}, {4.6, 0.2}, {0.0, -2.5}},
                   {Edge::segment(0, 1), Edge::segment(1, 2), Edge::segment(2, 3)});
  PenaltyObjective obj(pb);
  obj.set_mu(1e3);
  const auto th = obj.initial_point();
  obj.refresh_witnesses(th);
  EXPECT_EQ(obj.dimension(), 8u);
  EXPECT_LT(max_gradient_error(obj, th), 1e-5);
}

TEST(Optimizer, GradientWithPolarTiedAndPeriod) {
  OptimizationProblem pb;
  PeriodicCell cell;
  cell.wall_low = 0.0;
  cell.wall_high = 3.0;
  cell.period = 4.0;
  cell.optimize_period = true;
  pb.cell = cell;
  pb.r = 1.0;
  // a - m - b with b tied to a one period on, and a polar spur at m.
  pb.net = Network({{0.0, 1.1}, {2.1, 1.3}, {4.0, 1.1}, {2.1, 2.2}},
                   {Edge::segment(0, 1), Edge::segment(1, 2), Edge::segment(1, 3)});
  pb.controls.assign(4, {});
  pb.controls[2] = {VertexMode::Tied, 0, 1};
  pb.controls[3] = {VertexMode::Polar, 1, 0, 0, 2 * kPi / 3};
  PenaltyObjective obj(pb);
  obj.set_mu(1e3);
  const auto th = obj.initial_point();
  obj.refresh_witnesses(th);
  EXPECT_EQ(obj.dimension(), 2u + 2u + 1u + 1u);
  EXPECT_LT(max_gradient_error(obj, th), 1e-5);
  // The polar vertex keeps its angle exactly.
  const Network n = obj.network_at(th);
  EXPECT_NEAR(angle_between(n.vertex(3) - n.vertex(1), n.vertex(0) - n.vertex(1)), 2 * kPi / 3, 1e-12);
  EXPECT_NEAR(distance(n.vertex(2), n.vertex(0) + Vec2{4.0, 0.0}), 0.0, 1e-12);
}

TEST(Optimizer, PolygonalHorseshoeConvergesToArcLength) {
  OptimizationProblem pb;
  pb.curve = ConvexCurve::circle({0, 0}, 5.0);
  pb.r = 1.0;
  pb.net = polygonal_horseshoe(48);
  pb.n_samples = 2048;
  const OptimizationResult res = minimize_length(pb);
  const double arc = 4.0 * (kTwoPi - 2.0 * std::acos(0.8)) + 2.0 * (3.0 - 1.0);
  const double L = total_length(res.net);
  // A polygon covering the circle circumscribes M_r on its span, so it is
  // a little longer than the arc horseshoe.
  EXPECT_GT(L, arc - 1e-4);
  EXPECT_LT(L, arc + 0.05);
  EXPECT_LE(max_distance_functional(*pb.curve, res.net, 16384).value, 1.0 + 1e-5);
  // Objective does not increase within a stage, except where the witnesses
  // are re-seeded (every 100 iterations).
  for (std::size_t i = 1; i < res.trace.entries.size(); ++i)
    if (res.trace.entries[i].stage == res.trace.entries[i - 1].stage && res.trace.entries[i].iteration % 100 != 0)
      EXPECT_LE(res.trace.entries[i].objective, res.trace.entries[i - 1].objective + 1e-9 * std::abs(res.trace.entries[i - 1].objective));
}

TEST(Optimizer, InfeasibleStart) {
  OptimizationProblem pb;
  pb.curve = ConvexCurve::circle({0, 0}, 5.0);
  pb.r = 1.0;
  pb.net = Network({{-1, 0}, {1, 0}}, {Edge::segment(0, 1)});
  EXPECT_THROW(minimize_length(pb), InfeasibleStart);
}

TEST(Optimizer, MergePassSplitsDegreeFour) {
  // Two tripods joined by a vanishing edge become a degree-4 vertex, then
  // are split again into two junctions.
  const Network n({{0, 0}, {1e-6, 0}, {-1, 1}, {-1, -1}, {1, 1}, {1, -1}},
                  {Edge::segment(0, 1), Edge::segment(0, 2), Edge::segment(0, 3), Edge::segment(1, 4), Edge::segment(1, 5)});
  const Network m = merge_pass(n, 1.0);
  EXPECT_TRUE(check_structure(m).ok());
  for (int v = 0; v < m.vertex_count(); ++v) EXPECT_LE(m.degree(v), 3);
  EXPECT_EQ(m.vertex_count(), 6);
}
