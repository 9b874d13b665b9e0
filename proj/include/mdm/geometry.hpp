#pragma once

#include <cmath>
#include <numbers>
#include <optional>

namespace mdm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Absolute tolerance for geometric predicates (membership, incidence).
inline constexpr double kTauGeom = 1e-9;
/// Tolerance for "parallel to a ray" and angle comparisons, in radians.
inline constexpr double kTauAngle = 1e-7;
/// Relative tolerance (times r) for energetic-point detection.
inline constexpr double kTauClassRel = 1e-5;
/// Default first-order stationarity tolerance.
inline constexpr double kTauStat = 1e-5;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
  double angle() const { return std::atan2(y, x); }
};

using Point2 = Vec2;

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
/// Counterclockwise quarter turn.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }
inline Vec2 from_polar(double radius, double theta) {
  return {radius * std::cos(theta), radius * std::sin(theta)};
}
inline Vec2 rotate(Vec2 v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}
inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Unit direction vector. Construction normalizes; a zero vector is rejected by
/// returning nullopt from `from`.
class Direction {
 public:
  explicit Direction(double theta) : v_(std::cos(theta), std::sin(theta)) {}
  static std::optional<Direction> from(Vec2 v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) return std::nullopt;
    return Direction(v / n, 0);
  }
  Vec2 vec() const { return v_; }
  double angle() const { return v_.angle(); }
  Direction reversed() const { return Direction(-v_, 0); }
  Direction rotated(double theta) const { return Direction(rotate(v_, theta), 0); }

 private:
  Direction(Vec2 unit, int) : v_(unit) {}
  Vec2 v_;
};

inline Vec2 normalized(Vec2 v) {
  const double n = v.norm();
  return n > 0.0 ? v / n : Vec2{};
}

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}
/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) {
  a = wrap_two_pi(a);
  return a > kPi ? a - kTwoPi : a;
}
/// Unsigned angle in [0, pi] between two nonzero vectors.
inline double angle_between(Vec2 a, Vec2 b) {
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

struct ClosestPoint {
  Point2 point;
  double distance = 0.0;
  double param = 0.0;  // segment: t in [0,1]; arc: fraction of the span
};

inline ClosestPoint closest_on_segment(Point2 p, Point2 a, Point2 b) {
  const Vec2 d = b - a;
  const double len2 = d.norm2();
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  const Point2 c = a + d * t;
  return {c, distance(p, c), t};
}

/// Circular arc from polar angle `start` sweeping `sweep` radians (sign gives
/// orientation, positive is counterclockwise).
struct ArcGeom {
  Point2 center;
  double radius = 0.0;
  double start = 0.0;
  double sweep = 0.0;

  Point2 at(double frac) const { return center + from_polar(radius, start + sweep * frac); }
  double length() const { return radius * std::abs(sweep); }
  /// Fraction along the arc of polar angle `theta`, or nullopt if outside.
  std::optional<double> fraction_of(double theta) const {
    double rel = sweep >= 0.0 ? wrap_two_pi(theta - start) : wrap_two_pi(start - theta);
    const double span = std::abs(sweep);
    if (rel <= span) return span > 0.0 ? rel / span : 0.0;
    return std::nullopt;
  }
};

inline ClosestPoint closest_on_arc(Point2 p, const ArcGeom& arc) {
  const Vec2 rel = p - arc.center;
  if (rel.norm2() > 0.0) {
    if (auto frac = arc.fraction_of(rel.angle())) {
      const Point2 c = arc.at(*frac);
      return {c, distance(p, c), *frac};
    }
  }
  const Point2 a = arc.at(0.0), b = arc.at(1.0);
  const double da = distance(p, a), db = distance(p, b);
  return da <= db ? ClosestPoint{a, da, 0.0} : ClosestPoint{b, db, 1.0};
}

}  // namespace mdm
