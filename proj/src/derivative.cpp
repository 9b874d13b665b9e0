#include "mdm/derivative.hpp"

#include <algorithm>
#include <cmath>

#include "mdm/errors.hpp"

namespace mdm {

DerivativeResult derivative(const LocalConfig& c) {
  double v = 0.0;
  switch (c.case_id) {
    case 1: v = std::cos(c.alpha); break;
    case 2: v = 2.0 * std::cos(c.alpha) * std::cos(c.beta); break;
    case 3:
    case 4: {
      const double s2a = std::sin(2.0 * c.alpha);
      if (std::abs(s2a) < 1e-14) throw SingularConfig("sin(2 alpha) vanishes at alpha = " + std::to_string(c.alpha));
      const double num = c.case_id == 3 ? std::sin(c.alpha + c.beta) : std::sin(c.alpha + c.beta) + std::sin(c.alpha + c.gamma);
      v = std::cos(c.alpha + c.delta) * num / s2a;
      break;
    }
    default: throw Error("derivative case must be 1..4, got " + std::to_string(c.case_id));
  }
  return {v, c.case_id, c};
}

namespace {

Vec2 outward_tangent(const ConvexCurve& curve, double s, Point2 x) {
  const Vec2 t = curve.tangent(s);
  return dot(t, curve.point(s) - x) >= 0.0 ? t : -t;
}

// Angles for an energetic point x with leaving edge directions `leaving`.
LocalConfig make_config(int case_id, double r, Point2 x, Point2 y_moving, Point2 y_fixed, Vec2 t,
                        const std::vector<Vec2>& leaving) {
  LocalConfig c;
  c.case_id = case_id;
  c.r = r;
  if (case_id <= 2) {
    c.alpha = std::acos(std::clamp(dot(normalized(y_moving - x), t), -1.0, 1.0));
    if (case_id == 2) c.beta = 0.5 * angle_between(leaving.at(0), leaving.at(1));
    return c;
  }
  const Vec2 e1 = normalized(y_moving - y_fixed);
  Vec2 e2 = perp(e1);
  if (dot(e2, x - y_fixed) < 0.0) e2 = -e2;
  auto polar = [&](Vec2 v) { return std::atan2(dot(v, e2), dot(v, e1)); };
  c.alpha = polar(x - y_fixed);
  c.delta = polar(t);
  c.beta = -polar(-leaving.at(0));
  if (case_id == 4) c.gamma = -polar(-leaving.at(1));
  return c;
}

template <class F>
double bisect_root(F&& g, double a, double b) {
  double ga = g(a);
  for (int i = 0; i < 200 && b - a > 0.0; ++i) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double gm = g(m);
    if ((gm <= 0.0) == (ga <= 0.0)) { a = m; ga = gm; } else { b = m; }
  }
  return 0.5 * (a + b);
}

}  // namespace

void orient_outward(LocalScene& scene) {
  const Vec2 t = scene.curve.tangent(scene.s_moving);
  scene.direction = dot(t, scene.curve.point(scene.s_moving) - scene.x) >= 0.0 ? 1.0 : -1.0;
}

LocalConfig config_from_scene(const LocalScene& sc) {
  const Vec2 t = sc.curve.tangent(sc.s_moving) * sc.direction;
  std::vector<Vec2> leaving;
  for (const Point2& z : sc.z) leaving.push_back(normalized(z - sc.x));
  return make_config(sc.case_id, sc.r, sc.x, sc.curve.point(sc.s_moving), sc.curve.point(sc.s_fixed), t, leaving);
}

double local_length(const LocalScene& sc, double eps) {
  const Point2 y = sc.curve.point(sc.s_moving + sc.direction * eps);
  switch (sc.case_id) {
    case 1: {
      if (sc.z.size() != 1) throw CaseDetectionFailure("case 1 needs one segment");
      return distance(sc.z[0], y) - sc.r;
    }
    case 2: {
      if (sc.z.size() != 2) throw CaseDetectionFailure("case 2 needs two segments");
      // x = y + r e(phi) with the ray from y through x along the bisector.
      auto g = [&](double phi) {
        const Point2 x = y + from_polar(sc.r, phi);
        const Vec2 b = normalized(sc.z[0] - x) + normalized(sc.z[1] - x);
        return cross(from_polar(1.0, phi), b);
      };
      const double phi0 = (sc.x - sc.curve.point(sc.s_moving)).angle();
      double lo = phi0, hi = phi0;
      for (double w = 1e-3; w < 1.0; w *= 2.0) {
        lo = phi0 - w;
        hi = phi0 + w;
        if ((g(lo) <= 0.0) != (g(hi) <= 0.0)) break;
      }
      if ((g(lo) <= 0.0) == (g(hi) <= 0.0)) throw CaseDetectionFailure("case 2 bisector condition has no root");
      const double phi = bisect_root(g, lo, hi);
      const Point2 x = y + from_polar(sc.r, phi);
      return distance(x, sc.z[0]) + distance(x, sc.z[1]);
    }
    case 3:
    case 4: {
      if (sc.z.size() != static_cast<std::size_t>(sc.case_id - 2))
        throw CaseDetectionFailure("case " + std::to_string(sc.case_id) + " has the wrong segment count");
      const Point2 y1 = sc.curve.point(sc.s_fixed);
      const double d = distance(y1, y);
      if (d >= 2.0 * sc.r || !(d > 0.0)) throw CaseDetectionFailure("balls around the corresponding points do not meet");
      const Vec2 e1 = (y - y1) / d;
      const double h = std::sqrt(sc.r * sc.r - 0.25 * d * d);
      const Point2 mid = (y + y1) * 0.5;
      const Point2 c1 = mid + perp(e1) * h, c2 = mid - perp(e1) * h;
      const Point2 x = distance(c1, sc.x) <= distance(c2, sc.x) ? c1 : c2;
      double len = 0.0;
      for (const Point2& z : sc.z) len += distance(x, z);
      return len;
    }
    default: throw CaseDetectionFailure("unknown case " + std::to_string(sc.case_id));
  }
}

double finite_difference_oracle(const LocalScene& scene, double eps) {
  return (local_length(scene, eps) - local_length(scene, -eps)) / (2.0 * eps);
}

double one_sided_difference(const LocalScene& scene, double eps) {
  return (local_length(scene, eps) - local_length(scene, 0.0)) / eps;
}

double richardson_oracle(const LocalScene& scene, double h) {
  return (4.0 * finite_difference_oracle(scene, 0.5 * h) - finite_difference_oracle(scene, h)) / 3.0;
}

bool StationarityReport::ok() const {
  for (const auto& p : points)
    if (!p.nonnegative) return false;
  for (const auto& p : pairs)
    if (!p.equal || !p.opposite_sides) return false;
  return true;
}

double StationarityReport::min_derivative() const {
  double m = 0.0;
  bool any = false;
  for (const auto& p : points) {
    m = any ? std::min(m, p.value) : p.value;
    any = true;
  }
  return m;
}

double StationarityReport::max_pair_gap() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, std::abs(p.d1 - p.d2));
  return m;
}

StationarityReport check_stationarity(const Network& net, const ConvexCurve& curve, double r,
                                      const std::vector<EnergeticRecord>& records, double tau) {
  StationarityReport rep;
  rep.tau = tau;
  for (int i = 0; i < static_cast<int>(records.size()); ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    if (rec.cls != PointClass::Energetic) continue;
    if (!rec.case_id) {
      rep.skipped.push_back(i);
      continue;
    }
    std::vector<Vec2> leaving;
    if (rec.vertex >= 0) {
      for (int e : net.incidence()[static_cast<std::size_t>(rec.vertex)]) leaving.push_back(net.leaving_direction(e, rec.vertex));
    } else {
      const Edge& ed = net.edge(rec.edge);
      const Vec2 d = normalized(net.vertex(ed.b) - net.vertex(ed.a));
      leaving = {d, -d};
    }
    const int ncorr = static_cast<int>(rec.corresponding.size());
    for (int j = 0; j < ncorr; ++j) {
      const auto& ym = rec.corresponding[static_cast<std::size_t>(j)];
      const Point2 yf = rec.corresponding[static_cast<std::size_t>(ncorr == 2 ? 1 - j : j)].y;
      const Vec2 t = outward_tangent(curve, ym.s, rec.x);
      PointDerivative pd;
      pd.record = i;
      pd.moving = j;
      pd.config = make_config(*rec.case_id, r, rec.x, ym.y, yf, t, leaving);
      pd.value = derivative(pd.config).value;
      pd.nonnegative = pd.value >= -tau;
      rep.points.push_back(pd);
    }
  }
  // Pairs of energetic points sharing a smooth corresponding point.
  const double merge = 10.0 * kTauClassRel * r;
  for (std::size_t a = 0; a < rep.points.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.points.size(); ++b) {
      const auto& pa = rep.points[a];
      const auto& pb = rep.points[b];
      if (pa.record == pb.record) continue;
      const auto& ya = records[static_cast<std::size_t>(pa.record)].corresponding[static_cast<std::size_t>(pa.moving)];
      const auto& yb = records[static_cast<std::size_t>(pb.record)].corresponding[static_cast<std::size_t>(pb.moving)];
      if (distance(ya.y, yb.y) > merge) continue;
      PairCheck pc;
      pc.y = ya.y;
      pc.record1 = pa.record;
      pc.record2 = pb.record;
      pc.d1 = pa.value;
      pc.d2 = pb.value;
      pc.equal = std::abs(pa.value - pb.value) <= tau;
      const Vec2 n = curve.frame(ya.s).inward_normal();  // line (yY) with Y = y + r n
      const double s1 = cross(n, records[static_cast<std::size_t>(pa.record)].x - ya.y);
      const double s2 = cross(n, records[static_cast<std::size_t>(pb.record)].x - ya.y);
      pc.opposite_sides = s1 * s2 < 0.0;
      rep.pairs.push_back(pc);
    }
  }
  return rep;
}

StationarityReport check_stationarity(const Network& net, const ConvexCurve& curve, double r, double tau) {
  return check_stationarity(net, curve, r, classify_points(net, curve, r), tau);
}

}  // namespace mdm
