#include "mdm/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdm/coverage.hpp"
#include "mdm/errors.hpp"

namespace mdm {

namespace {

// Arclength positions on `mr` where the tangent line passes through p, a
// point outside the curve.
std::array<double, 2> tangency_params(const ConvexCurve& mr, Point2 p) {
  const double per = mr.perimeter();
  auto g = [&](double s) {
    const CurveFrame f = mr.frame(s);
    return cross(f.tangent, f.point - p);
  };
  constexpr int kScan = 1024;
  std::vector<double> roots;
  double prev = g(0.0);
  for (int k = 1; k <= kScan && roots.size() < 2; ++k) {
    const double s = per * k / kScan;
    const double cur = g(s);
    if ((prev < 0.0) != (cur < 0.0)) {
      double lo = per * (k - 1) / kScan, hi = s, glo = prev;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * per; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) { lo = mid; glo = gm; } else { hi = mid; }
      }
      roots.push_back(mr.wrap(0.5 * (lo + hi)));
    }
    prev = cur;
  }
  if (roots.size() != 2) throw Error("gap centre does not see two tangency points on the offset curve");
  return {roots[0], roots[1]};
}

double ccw_gap(double from, double to, double per) {
  double d = std::fmod(to - from, per);
  if (d < 0.0) d += per;
  return d;
}

struct GapGeometry {
  double s_start = 0.0, s_end = 0.0;  // far arc runs counterclockwise from s_start to s_end on M_r
  double arc = 0.0;
  Point2 y0;
  double length = 0.0;
};

GapGeometry gap_geometry(const ConvexCurve& curve, const ConvexCurve& mr, double r, double gap_s) {
  GapGeometry g;
  g.y0 = curve.point(gap_s);
  const auto roots = tangency_params(mr, g.y0);
  const double per = mr.perimeter();
  const double near = mr.project(g.y0).s;
  // The near arc faces the gap; the horseshoe follows the other one.
  if (ccw_gap(roots[0], near, per) < ccw_gap(roots[0], roots[1], per)) {
    g.s_start = roots[1];
    g.s_end = roots[0];
  } else {
    g.s_start = roots[0];
    g.s_end = roots[1];
  }
  g.arc = ccw_gap(g.s_start, g.s_end, per);
  g.length = g.arc + distance(mr.point(g.s_start), g.y0) + distance(mr.point(g.s_end), g.y0) - 2.0 * r;
  return g;
}

// Appends the counterclockwise path along `mr` from s0 to s1 (vertex `from`
// sits at s0) and returns the final vertex id.
int emit_offset_path(const ConvexCurve& mr, double s0, double s1, int from, std::vector<Point2>& verts,
                     std::vector<Edge>& edges) {
  const double per = mr.perimeter();
  const double span = ccw_gap(s0, s1, per);
  const CurveSpec& spec = mr.spec();
  auto add_vertex = [&](double s) {
    verts.push_back(mr.point(s));
    return static_cast<int>(verts.size()) - 1;
  };
  if (mr.kind() == CurveKind::Circle) {
    const int to = add_vertex(s1);
    Edge e = Edge::arc(from, to, spec.center, true);
    e.all_energetic = true;
    edges.push_back(e);
    return to;
  }
  if (mr.kind() == CurveKind::Stadium) {
    const double L = spec.length, R = spec.radius;
    const std::array<double, 4> breaks = {0.0, L, L + kPi * R, 2.0 * L + kPi * R};
    const std::array<Point2, 4> centers = {Point2{}, Point2{spec.center.x + 0.5 * L, spec.center.y}, Point2{},
                                           Point2{spec.center.x - 0.5 * L, spec.center.y}};
    double walked = 0.0;
    int cur = from;
    while (walked < span - 1e-12 * per) {
      const double s = mr.wrap(s0 + walked);
      int piece = 3;
      for (int k = 0; k < 4; ++k)
        if (s >= breaks[static_cast<std::size_t>(k)] - 1e-12 * per) piece = k;
      const double piece_end = piece == 3 ? per : breaks[static_cast<std::size_t>(piece + 1)];
      double step = std::min(piece_end - s, span - walked);
      if (step <= 1e-12 * per) { walked += std::max(step, 1e-12 * per); continue; }
      walked += step;
      const int to = add_vertex(walked >= span ? s1 : s0 + walked);
      Edge e = piece % 2 == 0 ? Edge::segment(cur, to) : Edge::arc(cur, to, centers[static_cast<std::size_t>(piece)], true);
      e.all_energetic = true;
      edges.push_back(e);
      cur = to;
    }
    return cur;
  }
  const int n = std::max(8, static_cast<int>(std::ceil(1024.0 * span / per)));
  int cur = from;
  for (int k = 1; k <= n; ++k) {
    const int to = add_vertex(k == n ? s1 : s0 + span * k / n);
    edges.push_back(Edge::segment(cur, to));
    cur = to;
  }
  return cur;
}

template <class F>
double golden_min(F&& f, double a, double b, double tol) {
  constexpr double g = 0.6180339887498949;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Horseshoe horseshoe_at(const ConvexCurve& curve, double r, double gap_s) {
  const ConvexCurve mr = inner_offset(curve, r, 1024).curve;
  const GapGeometry g = gap_geometry(curve, mr, r, gap_s);
  Horseshoe h;
  h.gap_s = curve.wrap(gap_s);
  h.gap_center = g.y0;
  h.tangency = {mr.point(g.s_start), mr.point(g.s_end)};
  for (int i = 0; i < 2; ++i)
    h.tips[static_cast<std::size_t>(i)] = g.y0 + normalized(h.tangency[static_cast<std::size_t>(i)] - g.y0) * r;
  h.arc_length = g.arc;
  std::vector<Point2> verts = {h.tips[0], h.tangency[0]};
  std::vector<Edge> edges = {Edge::segment(0, 1)};
  const int last = emit_offset_path(mr, g.s_start, g.s_end, 1, verts, edges);
  verts.back() = h.tangency[1];
  verts.push_back(h.tips[1]);
  edges.push_back(Edge::segment(last, static_cast<int>(verts.size()) - 1));
  h.net = Network(std::move(verts), std::move(edges));
  h.length = total_length(h.net);
  return h;
}

Horseshoe build_horseshoe(const ConvexCurve& curve, double r) {
  const ConvexCurve mr = inner_offset(curve, r, 1024).curve;
  const double per = curve.perimeter();
  if (curve.kind() == CurveKind::Circle) return horseshoe_at(curve, r, 0.75 * per);
  auto len = [&](double s) { return gap_geometry(curve, mr, r, s).length; };
  constexpr int kScan = 128;
  int best = 0;
  double best_len = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScan; ++k) {
    const double l = len(per * k / kScan);
    if (l < best_len) { best_len = l; best = k; }
  }
  const double s = golden_min(len, per * (best - 1) / kScan, per * (best + 1) / kScan, 1e-10 * per);
  return horseshoe_at(curve, r, curve.wrap(s));
}

namespace {

// Corner frames: position and the signs mapping gadget coordinates to the
// rectangle, in the order lower-left, upper-left, upper-right, lower-right.
struct CornerFrame {
  Point2 corner;
  double sx, sy;
};

std::array<CornerFrame, 4> corner_frames(double a, double b) {
  return {CornerFrame{{0.0, 0.0}, 1.0, 1.0}, CornerFrame{{0.0, b}, 1.0, -1.0}, CornerFrame{{a, b}, -1.0, -1.0},
          CornerFrame{{a, 0.0}, -1.0, 1.0}};
}

}  // namespace

RectangleNet build_rectangle_net(double a, double b, double r, bool refine, int n_samples) {
  if (!(r > 0.0) || !(r < std::min(a, b) / 10.0))
    throw RadiusTooLarge("rectangle networks need 0 < r < min(a, b) / 10, got r = " + std::to_string(r));
  const double c = std::cos(kPi / 24.0), s = std::sin(kPi / 24.0), q = std::sqrt(2.0);
  // Near-optimal gadget in corner units; refined below.
  const std::array<Point2, 5> gadget = {Point2{0.70722, 0.70699}, Point2{0.723714, 0.725155}, Point2{1.10837, 1.10837},
                                        Point2{c, q + s}, Point2{q + s, c}};
  const auto frames = corner_frames(a, b);
  std::vector<Point2> verts;
  std::vector<Edge> edges;
  std::array<int, 4> base{};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& f = frames[k];
    base[k] = static_cast<int>(verts.size());
    for (const Point2& g : gadget) verts.push_back({f.corner.x + f.sx * g.x * r, f.corner.y + f.sy * g.y * r});
    const int o = base[k];
    edges.push_back(Edge::segment(o, o + 1));
    edges.push_back(Edge::segment(o + 1, o + 2));
    edges.push_back(Edge::segment(o + 2, o + 3));
    edges.push_back(Edge::segment(o + 2, o + 4));
  }
  // Runs: left, top and right sides whole; the bottom side split by the gap.
  edges.push_back(Edge::segment(base[0] + 3, base[1] + 3));
  edges.push_back(Edge::segment(base[1] + 4, base[2] + 4));
  edges.push_back(Edge::segment(base[2] + 3, base[3] + 3));
  const int t1 = static_cast<int>(verts.size());
  verts.push_back({0.5 * a - 0.2 * r, 0.98 * r});
  verts.push_back({0.5 * a + 0.2 * r, 0.98 * r});
  edges.push_back(Edge::segment(base[0] + 4, t1));
  edges.push_back(Edge::segment(base[3] + 4, t1 + 1));

  RectangleNet out;
  out.a = a;
  out.b = b;
  out.r = r;
  out.seed = Network(verts, edges);
  out.net = out.seed;
  if (refine) {
    OptimizationProblem pb;
    pb.curve = ConvexCurve::rectangle({0.0, 0.0}, a, b);
    pb.r = r;
    pb.net = out.seed;
    pb.n_samples = n_samples;
    auto res = minimize_length(pb);
    out.net = std::move(res.net);
    out.trace = std::move(res.trace);
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& f = frames[k];
    auto local = [&](int v) {
      const Point2 p = out.net.vertex(base[k] + v);
      return Point2{(p.x - f.corner.x) * f.sx / r, (p.y - f.corner.y) * f.sy / r};
    };
    out.corners[k] = {local(0), local(1), local(2), local(3), local(4)};
  }
  out.length = total_length(out.net);
  out.constant = (2.0 * (a + b) - out.length) / r;
  return out;
}

namespace {

// Vertex order of the cell: A, bend, tripod, bend, B, top tripod, left tip, right tip.
constexpr int kCellA = 0, kCellB = 4, kCellLeftTip = 6, kCellRightTip = 7;

// Two seeds of the same topology: `spread` keeps long top arms as drawn for
// the threshold ratio, otherwise the top tripod starts compact.
Network stadium_cell_seed(double H, double r, bool spread) {
  const double h1 = std::min(1.1, 0.5 * H - 0.02);
  const double dx = (h1 - 1.0) * std::sqrt(3.0);
  std::vector<Point2> v;
  if (spread) {
    const double w = 3.66;
    const Point2 p2 = {0.0, std::max(H - 0.932, h1 + 0.05)}, tip = {0.915, H - 0.404};
    v = {{-0.5 * w, 1.0}, {-dx - 0.26, 1.0}, {0.0, h1}, {dx + 0.26, 1.0}, {0.5 * w, 1.0},
         p2, {-tip.x, tip.y}, tip};
  } else {
    const double w = 4.6;
    const double rise = h1 - 0.3;  // top arms climb to 0.3 below the wall
    const double ax = 2.0 * rise * std::cos(kPi / 6.0);
    v = {{-0.5 * w, 1.0}, {-dx - 0.3, 1.0}, {0.0, h1}, {dx + 0.3, 1.0}, {0.5 * w, 1.0},
         {0.0, H - h1}, {-ax, H - 0.3}, {ax, H - 0.3}};
  }
  for (auto& p : v) p = p * r;
  std::vector<Edge> e = {Edge::segment(0, 1), Edge::segment(1, 2), Edge::segment(2, 3), Edge::segment(3, 4),
                         Edge::segment(2, 5), Edge::segment(5, 6), Edge::segment(5, 7)};
  return Network(std::move(v), std::move(e));
}

StadiumCell optimize_cell(double R, double r, const Network& seed, double period, bool free_period, int n_samples) {
  OptimizationProblem pb;
  pb.cell = PeriodicCell{0.0, 2.0 * R, period, free_period, 2};
  pb.r = r;
  pb.net = seed;
  pb.controls.assign(static_cast<std::size_t>(seed.vertex_count()), VertexControl{});
  pb.controls[kCellB] = {VertexMode::Tied, kCellA, 1};
  // Both tripods keep exact 2pi/3 angles: bends and tips hang off the stem.
  const double third = 2.0 * kPi / 3.0;
  pb.controls[1] = {VertexMode::Polar, 2, 0, 5, third};
  pb.controls[3] = {VertexMode::Polar, 2, 0, 5, -third};
  pb.controls[kCellLeftTip] = {VertexMode::Polar, 5, 0, 2, -third};
  pb.controls[kCellRightTip] = {VertexMode::Polar, 5, 0, 2, third};
  pb.n_samples = n_samples;
  auto res = minimize_length(pb);
  StadiumCell cell;
  cell.R = R;
  cell.r = r;
  cell.net = std::move(res.net);
  cell.a = kCellA;
  cell.b = kCellB;
  cell.advance = res.period;
  cell.cell_length = total_length(cell.net);
  cell.c = cell.cell_length / cell.advance;
  cell.trace = std::move(res.trace);
  return cell;
}

}  // namespace

StadiumCell build_stadium_cell(double R, double r, int n_samples) {
  if (!(r > 0.0) || !(R > r)) throw InvalidRatio("stadium cells need R > r > 0");
  // Above the threshold the advance can run off toward two parallel runs
  // (cost 2); such results are kept only if no seed stays bounded.
  const double max_advance = 20.0 * (R + r);
  std::optional<StadiumCell> best, runaway;
  for (bool spread : {true, false}) {
    const Network seed = stadium_cell_seed(2.0 * R / r, r, spread);
    StadiumCell cell = optimize_cell(R, r, seed, distance(seed.vertex(kCellA), seed.vertex(kCellB)), true, n_samples);
    auto& slot = cell.advance <= max_advance ? best : runaway;
    if (!slot || cell.c < slot->c) slot = std::move(cell);
  }
  if (best) return *best;
  runaway->runaway = true;
  return *runaway;
}

ComparisonReport compare_stadium(double L, double R, double r, int n_samples) {
  ComparisonReport rep;
  rep.L = L;
  rep.R = R;
  rep.r = r;
  const ConvexCurve stadium = ConvexCurve::stadium({0.0, 0.0}, L, R);
  rep.tau_F = stadium.perimeter() / n_samples;
  const Horseshoe hs = build_horseshoe(stadium, r);
  rep.horseshoe = hs.net;
  rep.horseshoe_length = hs.length;
  rep.horseshoe_F = max_distance_functional(stadium, hs.net, n_samples).value;

  const StadiumCell best = build_stadium_cell(R, r);
  rep.cells = static_cast<int>(std::floor(L / best.advance + 0.5));
  if (rep.cells < 1) {
    rep.competitor_length = std::numeric_limits<double>::infinity();
    rep.competitor_F = std::numeric_limits<double>::infinity();
    rep.winner = "horseshoe";
    rep.caveat = "straight part shorter than one cell; no glued competitor exists";
    return rep;
  }
  // Re-optimize at the advance that tiles the straight part exactly.
  const double w = L / rep.cells;
  std::vector<Point2> stretched = best.net.vertices();
  const double ax = stretched[kCellA].x;
  for (auto& p : stretched) p.x = ax + (p.x - ax) * w / best.advance;
  const StadiumCell cell = optimize_cell(R, r, Network(stretched, best.net.edges()), w, false, 2048);

  std::vector<Point2> verts;
  std::vector<Edge> edges;
  const Point2 shift = {-0.5 * L - cell.net.vertex(kCellA).x, -R};
  const int nv = cell.net.vertex_count();
  int prev_b = -1;
  int first_a = -1;
  Point2 first_left_tip, last_right_tip;
  for (int k = 0; k < rep.cells; ++k) {
    std::vector<int> id(static_cast<std::size_t>(nv), -1);
    for (int v = 0; v < nv; ++v) {
      if (v == kCellA && prev_b >= 0) { id[static_cast<std::size_t>(v)] = prev_b; continue; }
      id[static_cast<std::size_t>(v)] = static_cast<int>(verts.size());
      verts.push_back(cell.net.vertex(v) + shift + Vec2{k * w, 0.0});
    }
    if (k == 0) first_a = id[kCellA];
    for (const Edge& e : cell.net.edges())
      edges.push_back(Edge::segment(id[static_cast<std::size_t>(e.a)], id[static_cast<std::size_t>(e.b)]));
    prev_b = id[kCellB];
    // Tips T1 (left) and T2 (right) of the top tripod.
    if (k == 0) first_left_tip = verts[static_cast<std::size_t>(id[kCellLeftTip])];
    if (k == rep.cells - 1) last_right_tip = verts[static_cast<std::size_t>(id[kCellRightTip])];
  }
  // End caps: arcs of M_r from the bottom run around each cap, then a run along
  // the top wall reaching the nearest tip's abscissa.
  const double rr = R - r;
  auto cap = [&](int bottom, Point2 center, bool ccw, double tip_x, double dir) {
    const int top = static_cast<int>(verts.size());
    verts.push_back({center.x, rr});
    Edge e = Edge::arc(bottom, top, center, ccw);
    e.all_energetic = true;
    edges.push_back(e);
    if ((tip_x - center.x) * dir > 0.0) {
      verts.push_back({tip_x, rr});
      edges.push_back(Edge::segment(top, top + 1));
    }
  };
  verts[static_cast<std::size_t>(first_a)] = {-0.5 * L, -rr};
  verts[static_cast<std::size_t>(prev_b)] = {0.5 * L, -rr};
  cap(first_a, {-0.5 * L, 0.0}, false, first_left_tip.x, 1.0);
  cap(prev_b, {0.5 * L, 0.0}, true, last_right_tip.x, -1.0);
  rep.competitor = Network(std::move(verts), std::move(edges));
  rep.competitor_length = total_length(rep.competitor);
  rep.competitor_F = max_distance_functional(stadium, rep.competitor, n_samples).value;
  rep.winner = rep.competitor_length < rep.horseshoe_length ? "competitor" : "horseshoe";
  rep.caveat = "lengths include O(1) end effects; the asymptotic costs are c L and 2 L";
  return rep;
}

}  // namespace mdm
