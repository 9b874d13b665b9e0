#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mdm/curve.hpp"
#include "mdm/network.hpp"
#include "mdm/optimizer.hpp"

namespace mdm {

/// An arc of M_r closed off by two segments tangent to M_r at the arc ends.
/// The tips stop on the circle of radius r around the gap centre, a point of M.
struct Horseshoe {
  Network net;
  double gap_s = 0.0;               // arclength of the gap centre on M
  Point2 gap_center;
  std::array<Point2, 2> tips{};
  std::array<Point2, 2> tangency{};
  double arc_length = 0.0;          // length along M_r
  double length = 0.0;
};

/// Horseshoe with its gap at arclength `gap_s` of `curve`.
Horseshoe horseshoe_at(const ConvexCurve& curve, double r, double gap_s);

/// Length-minimal horseshoe over the gap position (grid scan refined by
/// golden-section search). Circular arcs of M_r become arc edges, straight
/// pieces become segments and other offsets are approximated by chords.
/// Throws CurvatureViolation unless r is below the minimal curvature radius.
Horseshoe build_horseshoe(const ConvexCurve& curve, double r);

/// Corner gadget vertex positions in units of r, in the frame where the corner
/// sits at the origin and the two sides run along the positive axes.
struct CornerGadget {
  Point2 tip, bend, junction, exit_vertical, exit_horizontal;
};

struct RectangleNet {
  double a = 0.0, b = 0.0, r = 0.0;
  Network seed;
  Network net;
  std::array<CornerGadget, 4> corners{};
  OptimizationTrace trace;
  double length = 0.0;
  double constant = 0.0;  // (Per - length) / r
};

/// 21-segment network for the a x b rectangle with lower-left corner at the
/// origin: four corner gadgets joined by runs along the sides, the bottom run
/// broken by a gap whose two tips end on the circle of radius r around the
/// bottom midpoint. Seeds are refined by minimize_length unless `refine` is
/// false. Throws RadiusTooLarge unless r < min(a, b) / 10.
RectangleNet build_rectangle_net(double a, double b, double r, bool refine = true, int n_samples = 4096);

/// One periodic cell of the stadium competitor. The bottom wall lies at y = 0,
/// the top wall at y = 2R; vertex `a` is the left gluing point and `b` its
/// translate by (advance, 0).
struct StadiumCell {
  double R = 0.0, r = 0.0;
  Network net;
  int a = 0, b = 0;
  double cell_length = 0.0;
  double advance = 0.0;
  double c = 0.0;  // cell_length / advance
  // No seed kept the advance below 20 (R + r): the cost decreases toward 2 as
  // the cell stretches, the lattice no longer resolves r and coverage is not
  // certified.
  bool runaway = false;
  OptimizationTrace trace;
};

/// Optimizes the cell topology (bottom run with a tripod whose stem rises to a
/// second tripod covering the top wall) jointly over the vertices and the
/// advance, with both tripods held at exact 2pi/3 angles. At small R/r the top
/// arms shrink to zero length. Throws InvalidRatio unless R > r.
StadiumCell build_stadium_cell(double R, double r, int n_samples = 2048);

struct ComparisonReport {
  double L = 0.0, R = 0.0, r = 0.0;
  Network competitor;   // glued cells plus end caps
  Network horseshoe;
  double competitor_length = 0.0;
  double horseshoe_length = 0.0;
  double competitor_F = 0.0;
  double horseshoe_F = 0.0;
  double tau_F = 0.0;
  int cells = 0;
  std::string winner;   // "competitor" or "horseshoe"
  std::string caveat;
};

/// Builds the glued competitor over a stadium with straight part L and cap
/// radius R, and the best horseshoe, and compares their lengths. Lengths
/// differ by O(1) terms from the asymptotic costs cL and 2L.
ComparisonReport compare_stadium(double L, double R, double r, int n_samples = 4096);

}  // namespace mdm
