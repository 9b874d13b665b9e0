#include "mdm/curve.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "mdm/errors.hpp"

namespace mdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) sum += kGlWeights[i] * f(mid + half * kGlNodes[i]);
  return sum * half;
}

// Golden-section minimisation of a unimodal function on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, int iterations) {
  constexpr double g = 0.6180339887498949;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::Circle: return "circle";
    case CurveKind::Ellipse: return "ellipse";
    case CurveKind::Stadium: return "stadium";
    case CurveKind::Rectangle: return "rectangle";
    case CurveKind::Sampled: return "sampled";
    case CurveKind::Offset: return "offset";
  }
  return "unknown";
}

bool CurveSpec::operator==(const CurveSpec& o) const {
  if (kind != o.kind || center != o.center || radius != o.radius || semi_a != o.semi_a ||
      semi_b != o.semi_b || length != o.length || points != o.points || offset != o.offset ||
      density != o.density)
    return false;
  if (static_cast<bool>(base) != static_cast<bool>(o.base)) return false;
  return !base || *base == *o.base;
}

class CurveImpl {
 public:
  explicit CurveImpl(CurveSpec s) : spec(std::move(s)) {}
  virtual ~CurveImpl() = default;
  virtual double perimeter() const = 0;
  virtual CurveFrame frame(double s) const = 0;
  virtual double min_curvature_radius() const = 0;
  virtual bool is_smooth() const { return true; }
  virtual std::vector<double> corners() const { return {}; }
  virtual CurveProjection project(Point2 p) const = 0;
  virtual bool contains(Point2 p) const = 0;

  CurveSpec spec;
};

struct CurveAccess {
  static const CurveImpl& impl(const ConvexCurve& c) { return *c.impl_; }
  static ConvexCurve make(std::shared_ptr<const CurveImpl> impl) { return ConvexCurve(std::move(impl)); }
};

namespace {

class CircleImpl final : public CurveImpl {
 public:
  explicit CircleImpl(CurveSpec s) : CurveImpl(std::move(s)) {}
  double perimeter() const override { return kTwoPi * spec.radius; }
  CurveFrame frame(double s) const override {
    const double t = s / spec.radius;
    return {spec.center + from_polar(spec.radius, t), {-std::sin(t), std::cos(t)}, spec.radius};
  }
  double min_curvature_radius() const override { return spec.radius; }
  CurveProjection project(Point2 p) const override {
    const Vec2 rel = p - spec.center;
    const double n = rel.norm();
    const double theta = n > 0.0 ? wrap_two_pi(rel.angle()) : 0.0;
    return {std::abs(n - spec.radius), theta * spec.radius, spec.center + from_polar(spec.radius, theta)};
  }
  bool contains(Point2 p) const override { return distance(p, spec.center) <= spec.radius; }
};

class StadiumImpl final : public CurveImpl {
 public:
  explicit StadiumImpl(CurveSpec s) : CurveImpl(std::move(s)) {}
  double perimeter() const override { return 2.0 * spec.length + kTwoPi * spec.radius; }
  CurveFrame frame(double s) const override {
    const double L = spec.length, R = spec.radius;
    const Point2 c = spec.center;
    const Point2 cr{c.x + 0.5 * L, c.y}, cl{c.x - 0.5 * L, c.y};
    if (s < L) return {{c.x - 0.5 * L + s, c.y - R}, {1.0, 0.0}, kInf};
    s -= L;
    if (s < kPi * R) {
      const double t = -0.5 * kPi + s / R;
      return {cr + from_polar(R, t), {-std::sin(t), std::cos(t)}, R};
    }
    s -= kPi * R;
    if (s < L) return {{c.x + 0.5 * L - s, c.y + R}, {-1.0, 0.0}, kInf};
    s -= L;
    const double t = 0.5 * kPi + s / R;
    return {cl + from_polar(R, t), {-std::sin(t), std::cos(t)}, R};
  }
  double min_curvature_radius() const override { return spec.radius; }
  CurveProjection project(Point2 p) const override {
    const double L = spec.length, R = spec.radius;
    const Point2 c = spec.center;
    const double qx = std::clamp(p.x, c.x - 0.5 * L, c.x + 0.5 * L);
    const Point2 q{qx, c.y};
    const Vec2 rel = p - q;
    const double n = rel.norm();
    Vec2 dir = n > 0.0 ? rel / n : Vec2{0.0, -1.0};
    // Points on the straight axis project straight down/up.
    if (std::abs(p.x - qx) == 0.0 && n > 0.0) dir = {0.0, rel.y >= 0.0 ? 1.0 : -1.0};
    const Point2 foot = q + dir * R;
    double s = 0.0;
    if (std::abs(p.x - qx) == 0.0 || n == 0.0) {
      s = dir.y < 0.0 ? (qx - (c.x - 0.5 * L)) : (L + kPi * R + (c.x + 0.5 * L - qx));
    } else if (p.x > qx) {
      s = L + (dir.angle() + 0.5 * kPi) * R;
    } else {
      s = 2.0 * L + kPi * R + wrap_two_pi(dir.angle() - 0.5 * kPi) * R;
    }
    return {std::abs(n - R), std::clamp(s, 0.0, perimeter()), foot};
  }
  bool contains(Point2 p) const override {
    const double qx = std::clamp(p.x, spec.center.x - 0.5 * spec.length, spec.center.x + 0.5 * spec.length);
    return distance(p, {qx, spec.center.y}) <= spec.radius;
  }
};

class RectangleImpl final : public CurveImpl {
 public:
  explicit RectangleImpl(CurveSpec s) : CurveImpl(std::move(s)) {}
  double perimeter() const override { return 2.0 * (spec.semi_a + spec.semi_b); }
  std::array<Point2, 4> vertices() const {
    const Point2 o = spec.center;
    const double a = spec.semi_a, b = spec.semi_b;
    return {o, o + Vec2{a, 0.0}, o + Vec2{a, b}, o + Vec2{0.0, b}};
  }
  CurveFrame frame(double s) const override {
    const auto v = vertices();
    const std::array<double, 4> lens = {spec.semi_a, spec.semi_b, spec.semi_a, spec.semi_b};
    for (int i = 0; i < 4; ++i) {
      if (s < lens[i] || i == 3) {
        const Vec2 t = normalized(v[(i + 1) % 4] - v[i]);
        const double radius = s == 0.0 ? 0.0 : kInf;
        return {v[i] + t * s, t, radius};
      }
      s -= lens[i];
    }
    return {};
  }
  double min_curvature_radius() const override { return 0.0; }
  bool is_smooth() const override { return false; }
  std::vector<double> corners() const override {
    const double a = spec.semi_a, b = spec.semi_b;
    return {0.0, a, a + b, 2.0 * a + b};
  }
  CurveProjection project(Point2 p) const override {
    const auto v = vertices();
    CurveProjection best{kInf, 0.0, {}};
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto cp = closest_on_segment(p, v[i], v[(i + 1) % 4]);
      const double len = distance(v[i], v[(i + 1) % 4]);
      if (cp.distance < best.distance) best = {cp.distance, acc + cp.param * len, cp.point};
      acc += len;
    }
    return best;
  }
  bool contains(Point2 p) const override {
    const Point2 o = spec.center;
    return p.x >= o.x && p.x <= o.x + spec.semi_a && p.y >= o.y && p.y <= o.y + spec.semi_b;
  }
};

// Shared machinery for curves given by a smooth periodic parameterization
// u in [0, period) that is not arclength.
struct ParamEval {
  Point2 pos;
  Vec2 tangent;
  double speed = 0.0;
  double curvature_radius = 0.0;
};

class TabulatedImpl : public CurveImpl {
 public:
  using CurveImpl::CurveImpl;

  double perimeter() const override { return table_s_.back(); }
  CurveFrame frame(double s) const override {
    const ParamEval e = eval(param_of(s));
    return {e.pos, e.tangent, e.curvature_radius};
  }
  double min_curvature_radius() const override { return min_radius_; }
  CurveProjection project(Point2 p) const override {
    std::size_t best = 0;
    double best_d2 = kInf;
    for (std::size_t k = 0; k + 1 < table_pos_.size(); ++k) {
      const double d2 = (table_pos_[k] - p).norm2();
      if (d2 < best_d2) { best_d2 = d2; best = k; }
    }
    const double h = period_ / static_cast<double>(intervals_);
    const double u0 = static_cast<double>(best) * h;
    double u = golden_min([&](double t) { return (eval(t).pos - p).norm2(); }, u0 - h, u0 + h, 60);
    // Newton on <pos(u) - p, tangent(u)> = 0 polishes the golden-section result.
    for (int it = 0; it < 3; ++it) {
      const ParamEval e = eval(u);
      const double g = dot(e.pos - p, e.tangent);
      const double gp = e.speed * (1.0 + dot(e.pos - p, perp(e.tangent)) / e.curvature_radius);
      if (!(std::abs(gp) > 1e-14) || !std::isfinite(gp)) break;
      const double step = g / gp;
      if (std::abs(step) > h) break;
      u -= step;
    }
    u = wrap_param(u);
    const ParamEval e = eval(u);
    return {distance(e.pos, p), arclength_of(u), e.pos};
  }
  bool contains(Point2 p) const override {
    const auto pr = project(p);
    const ParamEval e = eval(param_of(pr.s));
    return cross(e.tangent, p - e.pos) >= -1e-15 * (1.0 + p.norm());
  }

  virtual ParamEval eval(double u) const = 0;

 protected:
  void build_table(double period, int intervals) {
    period_ = period;
    intervals_ = intervals;
    table_s_.assign(static_cast<std::size_t>(intervals) + 1, 0.0);
    table_pos_.resize(table_s_.size());
    table_speed_.resize(table_s_.size());
    min_radius_ = kInf;
    const double h = period / intervals;
    for (int k = 0; k <= intervals; ++k) {
      const ParamEval e = eval(k * h);
      table_pos_[k] = e.pos;
      table_speed_[k] = e.speed;
      min_radius_ = std::min(min_radius_, e.curvature_radius);
      if (k > 0)
        table_s_[k] = table_s_[k - 1] + gauss_legendre([&](double u) { return eval(u).speed; }, (k - 1) * h, k * h);
    }
  }
  double wrap_param(double u) const {
    u = std::fmod(u, period_);
    return u < 0.0 ? u + period_ : u;
  }
  double arclength_of(double u) const {
    const double h = period_ / intervals_;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(u / h), intervals_ - 1);
    return table_s_[k] + gauss_legendre([&](double t) { return eval(t).speed; }, k * h, u);
  }
  double param_of(double s) const {
    const double h = period_ / intervals_;
    auto it = std::upper_bound(table_s_.begin(), table_s_.end(), s);
    std::size_t k = it == table_s_.begin() ? 0 : static_cast<std::size_t>(it - table_s_.begin()) - 1;
    k = std::min<std::size_t>(k, intervals_ - 1);
    // Cubic Hermite model of s(u) on the interval; invert it by Newton.
    const double s0 = table_s_[k], s1 = table_s_[k + 1];
    const double m0 = table_speed_[k] * h, m1 = table_speed_[k + 1] * h;
    double t = (s1 > s0) ? (s - s0) / (s1 - s0) : 0.0;
    for (int it2 = 0; it2 < 4; ++it2) {
      const double t2 = t * t, t3 = t2 * t;
      const double val = (2 * t3 - 3 * t2 + 1) * s0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * s1 + (t3 - t2) * m1;
      const double der = (6 * t2 - 6 * t) * s0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * s1 + (3 * t2 - 2 * t) * m1;
      if (!(der > 0.0)) break;
      t -= (val - s) / der;
    }
    double u = (static_cast<double>(k) + std::clamp(t, 0.0, 1.0)) * h;
    // Newton on the exact arclength integral.
    for (int it2 = 0; it2 < 2; ++it2) {
      const double f = table_s_[k] + gauss_legendre([&](double v) { return eval(v).speed; }, k * h, u) - s;
      u -= f / eval(u).speed;
    }
    return u;
  }

  double period_ = 1.0;
  int intervals_ = 1;
  double min_radius_ = kInf;
  std::vector<double> table_s_;
  std::vector<Point2> table_pos_;
  std::vector<double> table_speed_;
};

class EllipseImpl final : public TabulatedImpl {
 public:
  explicit EllipseImpl(CurveSpec s) : TabulatedImpl(std::move(s)) {
    build_table(kTwoPi, spec.density);
    const double a = spec.semi_a, b = spec.semi_b;
    min_radius_ = std::min(b * b / a, a * a / b);
  }
  ParamEval eval(double u) const override {
    const double a = spec.semi_a, b = spec.semi_b;
    const double c = std::cos(u), s = std::sin(u);
    const Vec2 d1{-a * s, b * c};
    const double speed = d1.norm();
    return {spec.center + Vec2{a * c, b * s}, d1 / speed, speed, speed * speed * speed / (a * b)};
  }
};

// Periodic cubic spline through the sample points with unit knot spacing.
class SampledImpl final : public TabulatedImpl {
 public:
  explicit SampledImpl(CurveSpec s) : TabulatedImpl(std::move(s)) {
    const auto& pts = spec.points;
    const std::size_t n = pts.size();
    if (n < 4) throw Error("sampled curve needs at least 4 points");
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) { xs[i] = pts[i].x; ys[i] = pts[i].y; }
    mx_ = periodic_second_derivatives(xs);
    my_ = periodic_second_derivatives(ys);
    build_table(static_cast<double>(n), std::max<int>(spec.density, static_cast<int>(4 * n)));
    for (std::size_t k = 0; k + 1 < table_pos_.size(); ++k) {
      const ParamEval e = eval(static_cast<double>(k) * period_ / intervals_);
      if (!(e.curvature_radius > 0.0)) throw Error("sampled curve is not strictly convex and counterclockwise");
    }
  }
  ParamEval eval(double u) const override {
    const std::size_t n = spec.points.size();
    u = wrap_param(u);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), n - 1);
    const std::size_t j = (i + 1) % n;
    const double t = u - static_cast<double>(i);
    auto comp = [&](double p0, double p1, double m0, double m1, double& v, double& d1, double& d2) {
      const double a = p0, b = p1 - p0 - (2 * m0 + m1) / 6.0, c = m0 / 2.0, d = (m1 - m0) / 6.0;
      v = a + t * (b + t * (c + t * d));
      d1 = b + t * (2 * c + 3 * d * t);
      d2 = 2 * c + 6 * d * t;
    };
    double x, dx, ddx, y, dy, ddy;
    comp(spec.points[i].x, spec.points[j].x, mx_[i], mx_[j], x, dx, ddx);
    comp(spec.points[i].y, spec.points[j].y, my_[i], my_[j], y, dy, ddy);
    const Vec2 d1{dx, dy};
    const double speed = d1.norm();
    const double k = cross(d1, {ddx, ddy});
    const double radius = k > 0.0 ? speed * speed * speed / k : (k == 0.0 ? kInf : -1.0);
    return {{x, y}, d1 / speed, speed, radius};
  }

 private:
  // Second derivatives of the periodic interpolating cubic spline (unit knot
  // spacing): solves the cyclic system m[i-1] + 4 m[i] + m[i+1] = 6 (p[i+1] - 2p[i] + p[i-1]).
  static std::vector<double> periodic_second_derivatives(const std::vector<double>& p) {
    const std::size_t n = p.size();
    std::vector<double> rhs(n), m(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = 6.0 * (p[(i + 1) % n] - 2.0 * p[i] + p[(i + n - 1) % n]);
    // Diagonally dominant: Gauss-Seidel converges geometrically (factor ~1/4).
    for (int sweep = 0; sweep < 200; ++sweep) {
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = (rhs[i] - m[(i + n - 1) % n] - m[(i + 1) % n]) / 4.0;
        change = std::max(change, std::abs(v - m[i]));
        m[i] = v;
      }
      if (change < 1e-16 * (1.0 + std::abs(m[0]))) break;
    }
    return m;
  }
  std::vector<double> mx_, my_;
};

// Inner parallel curve of a tabulated base at distance `offset`.
class OffsetImpl final : public TabulatedImpl {
 public:
  OffsetImpl(CurveSpec s, std::shared_ptr<const TabulatedImpl> base)
      : TabulatedImpl(std::move(s)), base_(std::move(base)) {
    build_table(base_period(), spec.density);
    min_radius_ = base_->min_curvature_radius() - spec.offset;
  }
  ParamEval eval(double u) const override {
    const ParamEval b = base_->eval(u);
    const double d = spec.offset;
    const double scale = std::isfinite(b.curvature_radius) ? 1.0 - d / b.curvature_radius : 1.0;
    return {b.pos + perp(b.tangent) * d, b.tangent, b.speed * scale, b.curvature_radius - d};
  }

 private:
  double base_period() const;
  std::shared_ptr<const TabulatedImpl> base_;
};

// The base's period is exposed through a tiny accessor subclass trick: the
// tabulated base stores its period in a protected member.
struct PeriodPeek : TabulatedImpl {
  static double of(const TabulatedImpl& t) { return static_cast<const PeriodPeek&>(t).period_; }
};

double OffsetImpl::base_period() const { return PeriodPeek::of(*base_); }

std::shared_ptr<const CurveImpl> make_impl(const CurveSpec& spec);

}  // namespace

ConvexCurve ConvexCurve::circle(Point2 center, double radius) {
  CurveSpec s;
  s.kind = CurveKind::Circle;
  s.center = center;
  s.radius = radius;
  return from_spec(s);
}

ConvexCurve ConvexCurve::ellipse(Point2 center, double a, double b, int density) {
  CurveSpec s;
  s.kind = CurveKind::Ellipse;
  s.center = center;
  s.semi_a = a;
  s.semi_b = b;
  s.density = density;
  return from_spec(s);
}

ConvexCurve ConvexCurve::stadium(Point2 center, double segment_length, double radius) {
  CurveSpec s;
  s.kind = CurveKind::Stadium;
  s.center = center;
  s.length = segment_length;
  s.radius = radius;
  return from_spec(s);
}

ConvexCurve ConvexCurve::rectangle(Point2 lower_left, double width, double height) {
  CurveSpec s;
  s.kind = CurveKind::Rectangle;
  s.center = lower_left;
  s.semi_a = width;
  s.semi_b = height;
  return from_spec(s);
}

ConvexCurve ConvexCurve::sampled(std::vector<Point2> points, int density) {
  CurveSpec s;
  s.kind = CurveKind::Sampled;
  s.points = std::move(points);
  s.density = density;
  return from_spec(s);
}

namespace {

std::shared_ptr<const CurveImpl> make_impl(const CurveSpec& spec) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string("curve parameter must be positive: ") + what);
  };
  switch (spec.kind) {
    case CurveKind::Circle:
      positive(spec.radius, "radius");
      return std::make_shared<CircleImpl>(spec);
    case CurveKind::Ellipse:
      positive(spec.semi_a, "a");
      positive(spec.semi_b, "b");
      return std::make_shared<EllipseImpl>(spec);
    case CurveKind::Stadium:
      positive(spec.radius, "radius");
      if (!(spec.length >= 0.0)) throw Error("stadium length must be nonnegative");
      return std::make_shared<StadiumImpl>(spec);
    case CurveKind::Rectangle:
      positive(spec.semi_a, "width");
      positive(spec.semi_b, "height");
      return std::make_shared<RectangleImpl>(spec);
    case CurveKind::Sampled:
      return std::make_shared<SampledImpl>(spec);
    case CurveKind::Offset: {
      if (!spec.base) throw Error("offset curve without base");
      auto base = std::dynamic_pointer_cast<const TabulatedImpl>(make_impl(*spec.base));
      if (!base) throw Error("offset base must be an ellipse or sampled curve");
      return std::make_shared<OffsetImpl>(spec, std::move(base));
    }
  }
  throw Error("unknown curve kind");
}

}  // namespace

ConvexCurve ConvexCurve::from_spec(const CurveSpec& spec) { return ConvexCurve(make_impl(spec)); }

CurveKind ConvexCurve::kind() const { return impl_->spec.kind; }
const CurveSpec& ConvexCurve::spec() const { return impl_->spec; }
double ConvexCurve::perimeter() const { return impl_->perimeter(); }
CurveFrame ConvexCurve::frame(double s) const { return impl_->frame(wrap(s)); }
double ConvexCurve::min_curvature_radius() const { return impl_->min_curvature_radius(); }
bool ConvexCurve::is_smooth() const { return impl_->is_smooth(); }
std::vector<double> ConvexCurve::corner_params() const { return impl_->corners(); }
CurveProjection ConvexCurve::project(Point2 p) const { return impl_->project(p); }
bool ConvexCurve::contains(Point2 p) const { return impl_->contains(p); }

bool ConvexCurve::near_corner(double s, double tol) const {
  const double per = perimeter();
  for (double c : impl_->corners()) {
    const double d = std::abs(wrap(s - c));
    if (std::min(d, per - d) <= tol) return true;
  }
  return false;
}

double ConvexCurve::wrap(double s) const {
  const double per = perimeter();
  s = std::fmod(s, per);
  if (s < 0.0) s += per;
  return s >= per ? 0.0 : s;
}

std::vector<Point2> ConvexCurve::samples(int n) const {
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n));
  const double per = perimeter();
  for (int i = 0; i < n; ++i) out.push_back(point(per * i / n));
  return out;
}

OffsetCurve inner_offset(const ConvexCurve& curve, double r, int sample_count) {
  if (!curve.is_smooth())
    throw CurvatureViolation("curve is not smooth; inner offset requires a positive curvature radius bound");
  if (!(r >= 0.0) || !(r < curve.min_curvature_radius()))
    throw CurvatureViolation("offset " + std::to_string(r) + " is not below the minimal curvature radius " +
                             std::to_string(curve.min_curvature_radius()));
  const CurveSpec& spec = curve.spec();
  CurveSpec out;
  switch (spec.kind) {
    case CurveKind::Circle:
      out = spec;
      out.radius = spec.radius - r;
      break;
    case CurveKind::Stadium:
      out = spec;
      out.radius = spec.radius - r;
      break;
    case CurveKind::Offset:
      out = spec;
      out.offset = spec.offset + r;
      break;
    default:
      out.kind = CurveKind::Offset;
      out.base = std::make_shared<const CurveSpec>(spec);
      out.offset = r;
      out.density = spec.density;
      break;
  }
  ConvexCurve result = ConvexCurve::from_spec(out);
  return {curve, r, result, result.samples(sample_count)};
}

double depth_below_offset(const ConvexCurve& curve, double r, Point2 p) {
  const double d = curve.project(p).distance;
  return curve.contains(p) ? d - r : -(d + r);
}

}  // namespace mdm
