#include "mdm/classify.hpp"

#include <algorithm>
#include <numeric>

#include "mdm/coverage.hpp"
#include "mdm/errors.hpp"
#include "mdm/hull.hpp"

namespace mdm {

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::Energetic: return "energetic";
    case PointClass::Steiner: return "steiner";
    case PointClass::Entering: return "entering";
  }
  return "unknown";
}

namespace {

template <class F>
double golden_min(F&& f, double a, double b, int iterations = 80) {
  constexpr double g = 0.6180339887498949;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

template <class F>
double bisect(F&& f, double a, double b, int iterations = 100) {
  double fa = f(a);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm <= 0.0) == (fa <= 0.0)) { a = m; fa = fm; } else { b = m; }
  }
  return 0.5 * (a + b);
}

struct Candidate {
  double s;
  double clearance;  // dist(y, Σ)
};

std::vector<CorrespondingPoint> find_corresponding_impl(const DistanceIndex& index, const ConvexCurve& curve,
                                                        double r, Point2 x, double tau, int samples) {
  const double per = curve.perimeter();
  const int n = std::max(samples, 64);
  const double h = per / n;
  auto f = [&](double s) { return distance(x, curve.point(s)) - r; };
  std::vector<double> fv(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) fv[static_cast<std::size_t>(k)] = f(k * h);

  std::vector<double> cand_s;
  for (int k = 0; k < n; ++k) {
    const double f0 = fv[static_cast<std::size_t>(k)], f1 = fv[static_cast<std::size_t>((k + 1) % n)];
    const double fm = fv[static_cast<std::size_t>((k + n - 1) % n)];
    if ((f0 <= 0.0) != (f1 <= 0.0)) cand_s.push_back(bisect(f, k * h, (k + 1) * h));
    // Contacts where |x - y| has a local minimum near r (tangential contact,
    // or a corner of M). The bracket is one lattice step on each side.
    if (f0 <= fm && f0 <= f1 && std::abs(f0) <= tau + h) {
      const double s = golden_min([&](double t) { return f(t); }, (k - 1) * h, (k + 1) * h);
      if (std::abs(f(s)) <= tau) cand_s.push_back(s);
    }
    // Contacts from inside: |x - y| peaks at r, e.g. x covers a corner exactly.
    if (f0 >= fm && f0 >= f1 && std::abs(f0) <= tau + h) {
      const double s = golden_min([&](double t) { return -f(t); }, (k - 1) * h, (k + 1) * h);
      if (std::abs(f(s)) <= tau) cand_s.push_back(s);
    }
  }
  for (double s : curve.corner_params())
    if (std::abs(f(s)) <= tau) cand_s.push_back(s);
  std::vector<Candidate> cands;
  for (double s : cand_s) {
    s = curve.wrap(s);
    if (std::abs(f(s)) > tau) continue;
    const double clearance = index.query(curve.point(s)).distance;
    if (clearance >= r - tau) cands.push_back({s, clearance});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.s < b.s; });

  // Two candidates describe the same contact when |x - y| stays within tau
  // of r along the curve between them (or they are closer than 10 tau).
  auto same_contact = [&](double s0, double s1) {
    double d = s1 - s0;
    if (d < 0.0) d += per;
    if (distance(curve.point(s0), curve.point(s1)) < 10.0 * tau) return true;
    if (d > 0.5 * per) return false;
    const int steps = std::max(8, static_cast<int>(d / h) * 4);
    for (int i = 1; i < steps; ++i)
      if (std::abs(f(s0 + d * i / steps)) > tau) return false;
    return true;
  };
  // A corner representative wins over smooth ones, then higher clearance.
  auto better = [&](const Candidate& a, const Candidate& b) {
    const bool ca = curve.near_corner(a.s, 10.0 * tau), cb = curve.near_corner(b.s, 10.0 * tau);
    if (ca != cb) return ca;
    return a.clearance > b.clearance;
  };
  std::vector<Candidate> merged;
  for (const Candidate& c : cands) {
    if (!merged.empty() && same_contact(merged.back().s, c.s)) {
      if (better(c, merged.back())) merged.back() = c;
    } else {
      merged.push_back(c);
    }
  }
  if (merged.size() > 1 && same_contact(merged.back().s, merged.front().s)) {
    if (better(merged.back(), merged.front())) merged.front() = merged.back();
    merged.pop_back();
  }
  std::vector<CorrespondingPoint> out;
  for (const Candidate& c : merged) out.push_back({curve.point(c.s), c.s, !curve.near_corner(c.s, 10.0 * tau)});
  return out;
}

bool on_offset(const ConvexCurve& curve, double r, Point2 p) {
  return std::abs(depth_below_offset(curve, r, p)) <= kTauGeom * std::max(1.0, r);
}

std::optional<int> case_of(int degree, const std::vector<CorrespondingPoint>& ys) {
  if (ys.empty() || ys.size() > 2 || degree < 1 || degree > 2) return std::nullopt;
  for (const auto& y : ys)
    if (!y.smooth) return std::nullopt;
  return ys.size() == 1 ? degree : degree + 2;
}

}  // namespace

std::vector<CorrespondingPoint> find_corresponding(const Network& net, const ConvexCurve& curve, double r, Point2 x,
                                                   double tau, int samples) {
  const DistanceIndex index(net);
  return find_corresponding_impl(index, curve, r, x, tau, samples);
}

bool arc_is_all_energetic(const Network& net, int edge, const ConvexCurve& curve, double r, double tau) {
  if (net.edge(edge).kind != EdgeKind::Arc) return false;
  const DistanceIndex index(net);
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const Point2 p = net.edge_point(edge, t);
    if (std::abs(depth_below_offset(curve, r, p)) > tau) return false;
    const auto y = curve.project(p);
    if (index.query(y.point).distance < r - tau) return false;
  }
  return true;
}

std::vector<EnergeticRecord> classify_points(const Network& net, const ConvexCurve& curve, double r,
                                             const ClassifyOptions& opt) {
  require_valid(net);
  const auto F = max_distance_functional(curve, net, opt.n_samples);
  const double tau_F = curve.perimeter() / opt.n_samples;
  if (F.value > r + tau_F)
    throw CoverageViolation("F_M = " + std::to_string(F.value) + " exceeds r + tau_F = " + std::to_string(r + tau_F));
  const double tau = opt.tau_class_rel * r;
  const DistanceIndex index(net);

  std::vector<EnergeticRecord> out;
  auto finish = [&](EnergeticRecord& rec) {
    rec.on_offset = on_offset(curve, r, rec.x);
    rec.cls = !rec.corresponding.empty() ? PointClass::Energetic
              : rec.on_offset            ? PointClass::Entering
                                         : PointClass::Steiner;
    if (rec.cls == PointClass::Energetic) rec.case_id = case_of(rec.degree, rec.corresponding);
  };
  for (int v = 0; v < net.vertex_count(); ++v) {
    EnergeticRecord rec;
    rec.x = net.vertex(v);
    rec.vertex = v;
    rec.degree = net.degree(v);
    rec.corresponding = find_corresponding_impl(index, curve, r, rec.x, tau, opt.search_samples);
    finish(rec);
    out.push_back(std::move(rec));
  }

  // Edge-interior contacts: local maxima of dist(y, Σ) over M that reach r
  // and are realized strictly inside an edge.
  std::vector<bool> energetic_edge(static_cast<std::size_t>(net.edge_count()));
  for (int e = 0; e < net.edge_count(); ++e)
    energetic_edge[static_cast<std::size_t>(e)] =
        net.edge(e).all_energetic || arc_is_all_energetic(net, e, curve, r, tau);
  const int n = opt.search_samples;
  const double per = curve.perimeter(), h = per / n;
  std::vector<double> D(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) D[static_cast<std::size_t>(k)] = index.query(curve.point(k * h)).distance;
  for (int k = 0; k < n; ++k) {
    const double d0 = D[static_cast<std::size_t>(k)];
    if (d0 < r - tau - h) continue;
    if (d0 < D[static_cast<std::size_t>((k + n - 1) % n)] || d0 < D[static_cast<std::size_t>((k + 1) % n)]) continue;
    const double s = golden_min([&](double t) { return -index.query(curve.point(t)).distance; }, (k - 1) * h, (k + 1) * h);
    const auto hit = index.query(curve.point(s));
    if (hit.distance < r - tau || hit.edge < 0 || energetic_edge[static_cast<std::size_t>(hit.edge)]) continue;
    const Edge& ed = net.edge(hit.edge);
    if (distance(hit.point, net.vertex(ed.a)) <= 10.0 * tau || distance(hit.point, net.vertex(ed.b)) <= 10.0 * tau)
      continue;
    bool duplicate = false;
    for (const auto& rec : out)
      if (rec.vertex < 0 && distance(rec.x, hit.point) <= 10.0 * tau) duplicate = true;
    if (duplicate) continue;
    EnergeticRecord rec;
    rec.x = hit.point;
    rec.edge = hit.edge;
    rec.degree = 2;
    rec.corresponding = find_corresponding_impl(index, curve, r, rec.x, tau, opt.search_samples);
    finish(rec);
    if (rec.cls == PointClass::Energetic) out.push_back(std::move(rec));
  }
  return out;
}

namespace {

struct Piece {
  int edge;
  double t0, t1;
  int vertex0 = -1;  // vertex at t0 when the piece starts at a vertex
  int vertex1 = -1;
};

}  // namespace

std::vector<ComponentReport> component_diagnostics(const Network& net, const ConvexCurve& curve, double r,
                                                   const std::vector<EnergeticRecord>& records, double tau_rel) {
  const double tau = tau_rel * r;
  const double in_tol = kTauGeom * std::max(1.0, r);
  auto depth = [&](Point2 p) { return depth_below_offset(curve, r, p) + in_tol; };  // < 0 strictly outside N_r
  std::vector<Piece> pieces;
  constexpr int K = 128;
  for (int e = 0; e < net.edge_count(); ++e) {
    std::vector<double> d(K + 1);
    for (int j = 0; j <= K; ++j) d[static_cast<std::size_t>(j)] = depth(net.edge_point(e, static_cast<double>(j) / K));
    int j = 0;
    while (j <= K) {
      if (d[static_cast<std::size_t>(j)] >= 0.0) { ++j; continue; }
      const int j0 = j;
      while (j <= K && d[static_cast<std::size_t>(j)] < 0.0) ++j;
      const int j1 = j - 1;
      Piece p{e, 0.0, 1.0};
      auto g = [&](double t) { return depth(net.edge_point(e, t)); };
      if (j0 == 0) p.vertex0 = net.edge(e).a;
      else p.t0 = bisect(g, static_cast<double>(j0 - 1) / K, static_cast<double>(j0) / K);
      if (j1 == K) p.vertex1 = net.edge(e).b;
      else p.t1 = bisect(g, static_cast<double>(j1) / K, static_cast<double>(j1 + 1) / K);
      pieces.push_back(p);
    }
  }
  if (pieces.empty()) return {};

  std::vector<int> parent(pieces.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  std::vector<int> vertex_piece(static_cast<std::size_t>(net.vertex_count()), -1);
  for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
    for (int v : {pieces[static_cast<std::size_t>(i)].vertex0, pieces[static_cast<std::size_t>(i)].vertex1}) {
      if (v < 0) continue;
      int& slot = vertex_piece[static_cast<std::size_t>(v)];
      if (slot < 0) slot = i;
      else parent[static_cast<std::size_t>(find(i))] = find(slot);
    }
  }

  std::vector<int> roots;
  for (int i = 0; i < static_cast<int>(pieces.size()); ++i)
    if (find(i) == i) roots.push_back(i);

  std::vector<ComponentReport> reports;
  for (int root : roots) {
    ComponentReport rep;
    std::vector<Point2> hull_input;
    std::vector<int> comp_vertices;
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
      if (find(i) != root) continue;
      const Piece& p = pieces[static_cast<std::size_t>(i)];
      if (std::find(rep.edges.begin(), rep.edges.end(), p.edge) == rep.edges.end()) rep.edges.push_back(p.edge);
      auto add_entering = [&](Point2 q) {
        for (const Point2& e : rep.entering)
          if (distance(e, q) <= 10.0 * tau) return;
        rep.entering.push_back(q);
      };
      if (p.vertex0 < 0) add_entering(net.edge_point(p.edge, p.t0));
      else comp_vertices.push_back(p.vertex0);
      if (p.vertex1 < 0) add_entering(net.edge_point(p.edge, p.t1));
      else comp_vertices.push_back(p.vertex1);
      const int steps = net.edge(p.edge).kind == EdgeKind::Arc ? 32 : 1;
      for (int k = 0; k <= steps; ++k) hull_input.push_back(net.edge_point(p.edge, p.t0 + (p.t1 - p.t0) * k / steps));
    }
    std::sort(comp_vertices.begin(), comp_vertices.end());
    comp_vertices.erase(std::unique(comp_vertices.begin(), comp_vertices.end()), comp_vertices.end());
    for (const auto& rec : records) {
      if (rec.cls != PointClass::Energetic || rec.on_offset) continue;
      bool inside = false;
      if (rec.vertex >= 0) {
        inside = std::binary_search(comp_vertices.begin(), comp_vertices.end(), rec.vertex);
      } else {
        for (int i = 0; i < static_cast<int>(pieces.size()); ++i)
          if (find(i) == root && pieces[static_cast<std::size_t>(i)].edge == rec.edge &&
              depth(rec.x) < 0.0)
            inside = true;
      }
      if (inside) rep.energetic.push_back(rec.x);
    }
    rep.hull = convex_hull(hull_input, 10.0 * tau);
    for (const Point2& hv : rep.hull) {
      bool ent = false, en = false;
      for (const Point2& q : rep.entering) ent = ent || distance(q, hv) <= 10.0 * tau;
      for (const Point2& q : rep.energetic) en = en || distance(q, hv) <= 10.0 * tau;
      if (ent) ++rep.entering_hull_vertices;
      else if (!en) ++rep.unclassified_hull_vertices;
    }
    const int ne = static_cast<int>(rep.energetic.size());
    if (ne < 1 || ne > 2) rep.violations.push_back("energetic count " + std::to_string(ne) + " not in [1, 2]");
    if (rep.entering.size() > 3) rep.violations.push_back("entering count " + std::to_string(rep.entering.size()) + " exceeds 3");
    if (rep.hull.size() > 4) rep.violations.push_back("hull has " + std::to_string(rep.hull.size()) + " vertices");
    if (rep.entering_hull_vertices > 2)
      rep.violations.push_back("hull has " + std::to_string(rep.entering_hull_vertices) + " entering vertices");
    if (rep.unclassified_hull_vertices > 0)
      rep.violations.push_back(std::to_string(rep.unclassified_hull_vertices) + " hull vertices are neither energetic nor entering");
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace mdm
