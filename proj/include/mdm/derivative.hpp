#pragma once

#include <optional>
#include <vector>

#include "mdm/classify.hpp"
#include "mdm/curve.hpp"
#include "mdm/network.hpp"

namespace mdm {

/// Angles describing the neighbourhood of an energetic point x whose
/// corresponding point y moves along M by arclength epsilon.
///
/// Conventions (t is the unit tangent of the motion, chosen so that y moves
/// away from x: <t, y - x> >= 0):
///  - cases 1, 2: cos(alpha) = <unit(y - x), t>; case 2 beta is half the angle
///    between the two edges at x.
///  - cases 3, 4: frame e1 = unit(y2 - y1) (y2 moves, y1 is fixed), e2 the
///    normal pointing to x. alpha is the base angle at y1, delta the polar
///    angle of t, and beta (gamma) the clockwise polar angle of
///    unit(x - z1) (unit(x - z2)).
struct LocalConfig {
  int case_id = 1;
  double r = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

struct DerivativeResult {
  double value = 0.0;
  int case_id = 1;
  LocalConfig inputs;
};

/// Closed-form derivative of the local length:
///   1: cos a    2: 2 cos a cos b    3: cos(a+d) sin(a+b) / sin 2a
///   4: cos(a+d) (sin(a+b) + sin(a+g)) / sin 2a
/// Throws SingularConfig when sin 2a vanishes in cases 3-4.
DerivativeResult derivative(const LocalConfig& config);

/// Geometric description of a local configuration for the finite-difference
/// oracle.
struct LocalScene {
  ConvexCurve curve;
  double r = 1.0;
  int case_id = 1;
  Point2 x;
  std::vector<Point2> z;        // far ends of the incident (truncated) segments
  double s_moving = 0.0;        // arclength of the moving corresponding point
  double s_fixed = 0.0;         // arclength of the fixed one (cases 3-4)
  double direction = 1.0;       // +1 or -1: sense of the motion along M
};

/// Sets `direction` so that the motion is away from x.
void orient_outward(LocalScene& scene);

/// Angles of the scene at epsilon = 0 under the conventions above.
LocalConfig config_from_scene(const LocalScene& scene);

/// Local length after moving y by arclength eps, with x_eps rebuilt from the
/// case's defining condition. Throws CaseDetectionFailure if the condition has
/// no solution near x.
double local_length(const LocalScene& scene, double eps);

/// Central difference (L(eps) - L(-eps)) / (2 eps).
double finite_difference_oracle(const LocalScene& scene, double eps);
/// One-sided difference (L(eps) - L(0)) / eps; eps may be negative.
double one_sided_difference(const LocalScene& scene, double eps);
/// Richardson extrapolation (4 D(h/2) - D(h)) / 3 of the central difference.
double richardson_oracle(const LocalScene& scene, double h);

struct PointDerivative {
  int record = -1;
  int moving = 0;          // index into the record's corresponding points
  LocalConfig config;
  double value = 0.0;
  bool nonnegative = true;
};

struct PairCheck {
  Point2 y;
  int record1 = -1, record2 = -1;
  double d1 = 0.0, d2 = 0.0;
  bool equal = true;
  bool opposite_sides = true;
};

struct StationarityReport {
  double tau = kTauStat;
  std::vector<PointDerivative> points;
  std::vector<PairCheck> pairs;
  std::vector<int> skipped;  // energetic records without a case (corner or >2 corresponding points)

  bool ok() const;
  double min_derivative() const;
  double max_pair_gap() const;
};

/// Evaluates the case derivative for every (energetic point, smooth
/// corresponding point) pair, outward motion, and the paired-derivative and
/// opposite-sides conditions at every corresponding point shared by two
/// energetic points.
StationarityReport check_stationarity(const Network& net, const ConvexCurve& curve, double r,
                                      const std::vector<EnergeticRecord>& records, double tau = kTauStat);
StationarityReport check_stationarity(const Network& net, const ConvexCurve& curve, double r, double tau = kTauStat);

}  // namespace mdm
