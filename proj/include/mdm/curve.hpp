#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mdm/geometry.hpp"

namespace mdm {

enum class CurveKind { Circle, Ellipse, Stadium, Rectangle, Sampled, Offset };

std::string to_string(CurveKind kind);

/// Position, unit tangent (counterclockwise orientation) and curvature radius
/// at one arclength position. Straight pieces report +infinity; rectangle
/// corners report 0.
struct CurveFrame {
  Point2 point;
  Vec2 tangent;
  double curvature_radius = 0.0;

  /// Inward unit normal (the curve is traversed counterclockwise).
  Vec2 inward_normal() const { return perp(tangent); }
};

struct CurveProjection {
  double distance = 0.0;
  double s = 0.0;  // arclength of the nearest curve point
  Point2 point;
};

/// Shape parameters, sufficient to rebuild the curve. `points` is only used by
/// Sampled; `base` and `offset` only by Offset.
struct CurveSpec {
  CurveKind kind = CurveKind::Circle;
  Point2 center;          // circle, ellipse, stadium; lower-left corner for a rectangle
  double radius = 0.0;    // circle, stadium cap radius
  double semi_a = 0.0;    // ellipse semi-axes; rectangle width/height
  double semi_b = 0.0;
  double length = 0.0;    // stadium straight-part length
  std::vector<Point2> points;
  std::shared_ptr<const CurveSpec> base;
  double offset = 0.0;
  int density = 4096;

  bool operator==(const CurveSpec& other) const;
};

class CurveImpl;

/// Closed convex planar curve exposed through its counterclockwise arclength
/// parameterization s in [0, perimeter). Immutable; copies share state.
///
/// Circles, stadiums and rectangles are evaluated in closed form. Ellipses,
/// spline-interpolated samples and inner parallel curves of those go through an
/// arclength table (default 4096 intervals) that is inverted with a cubic
/// Hermite guess followed by Newton refinement on the exact arclength integral.
class ConvexCurve {
 public:
  static ConvexCurve circle(Point2 center, double radius);
  static ConvexCurve ellipse(Point2 center, double a, double b, int density = 4096);
  /// Boundary of the `radius`-neighbourhood of the horizontal segment of the
  /// given length centred at `center`.
  static ConvexCurve stadium(Point2 center, double segment_length, double radius);
  static ConvexCurve rectangle(Point2 lower_left, double width, double height);
  /// Periodic cubic spline through counterclockwise convex samples.
  static ConvexCurve sampled(std::vector<Point2> points, int density = 4096);
  static ConvexCurve from_spec(const CurveSpec& spec);

  CurveKind kind() const;
  const CurveSpec& spec() const;
  double perimeter() const;
  CurveFrame frame(double s) const;
  Point2 point(double s) const { return frame(s).point; }
  Vec2 tangent(double s) const { return frame(s).tangent; }
  double curvature_radius(double s) const { return frame(s).curvature_radius; }
  double min_curvature_radius() const;
  bool is_smooth() const;
  /// Arclength positions of non-smooth points (rectangle corners).
  std::vector<double> corner_params() const;
  /// True when arclength `s` is within `tol` of a corner.
  bool near_corner(double s, double tol) const;
  /// Nearest curve point to p (exact for analytic kinds; table search plus
  /// local refinement otherwise).
  CurveProjection project(Point2 p) const;
  /// Closed convex region bounded by the curve.
  bool contains(Point2 p) const;
  /// n arclength-uniform samples starting at s = 0.
  std::vector<Point2> samples(int n) const;
  /// Wraps s into [0, perimeter).
  double wrap(double s) const;

 private:
  explicit ConvexCurve(std::shared_ptr<const CurveImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const CurveImpl> impl_;
  friend struct CurveAccess;
};

/// Inner parallel curve together with a sample list.
struct OffsetCurve {
  ConvexCurve base;
  double offset = 0.0;
  ConvexCurve curve;
  std::vector<Point2> samples;
};

/// M_r: the inner boundary of the open r-neighbourhood of `curve`.
/// Throws CurvatureViolation if r is not below the minimal curvature radius
/// (rectangles always throw since their corners have zero radius).
OffsetCurve inner_offset(const ConvexCurve& curve, double r, int sample_count = 4096);

/// Signed "depth" of p relative to the inner parallel region N_r:
/// dist(p, M) - r for points inside N, negative outside N.
double depth_below_offset(const ConvexCurve& curve, double r, Point2 p);

}  // namespace mdm
