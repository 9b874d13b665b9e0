#include "mdm/steiner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "mdm/coverage.hpp"
#include "mdm/errors.hpp"

namespace mdm {

std::optional<int> WindRose::ray_of(Vec2 v, double tol) const {
  if (!(v.norm2() > 0.0)) return std::nullopt;
  const double rel = wrap_two_pi(v.angle() - base_angle);
  const int k = static_cast<int>(std::lround(rel / (kPi / 3.0))) % 6;
  if (std::abs(wrap_pi(rel - k * kPi / 3.0)) <= tol) return k;
  return std::nullopt;
}

double WindRose::adjacency_residual() const {
  double worst = 0.0;
  for (int k = 0; k < 6; ++k)
    worst = std::max(worst, std::abs(weights[k] - weights[(k + 5) % 6] - weights[(k + 1) % 6]));
  return worst;
}

WindRose make_wind_rose(double base_angle, double w0, double w1, Point2 origin) {
  return {origin, base_angle, {w0, w1, w1 - w0, -w0, -w1, w0 - w1}};
}

ValidationReport validate_local_steiner(const Network& net, const std::vector<Point2>& terminals, double tau_angle) {
  ValidationReport rep;
  const auto structure = check_structure(net);
  if (!structure.acyclic || !structure.connected) {
    rep.acyclic = structure.acyclic;
    for (const auto& f : structure.failures) rep.failures.push_back(f);
  }
  if (net.arc_count() > 0) {
    rep.segments_only = false;
    rep.failures.push_back("segments: network contains arcs");
  }
  std::vector<bool> is_terminal(static_cast<std::size_t>(net.vertex_count()), false);
  for (const Point2& t : terminals) {
    bool found = false;
    for (int v = 0; v < net.vertex_count(); ++v)
      if (distance(net.vertex(v), t) <= kTauGeom * std::max(1.0, t.norm())) {
        is_terminal[static_cast<std::size_t>(v)] = true;
        found = true;
      }
    if (!found && net.vertex_count() > 0 && dist_point_to_network(t, net).distance > kTauGeom * std::max(1.0, t.norm())) {
      rep.terminals = false;
      rep.failures.push_back("terminals: a terminal is not on the network");
    }
  }
  for (int v = 0; v < net.vertex_count(); ++v) {
    if (is_terminal[static_cast<std::size_t>(v)] || net.degree(v) < 2) continue;
    std::vector<double> angles;
    for (int e : net.incidence()[static_cast<std::size_t>(v)]) angles.push_back(net.leaving_direction(e, v).angle());
    std::sort(angles.begin(), angles.end());
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const double next = i + 1 < angles.size() ? angles[i + 1] : angles[0] + kTwoPi;
      double gap = next - angles[i];
      if (angles.size() == 2) gap = std::min(gap, kTwoPi - gap);
      rep.min_angle = std::min(rep.min_angle, gap);
      if (angles.size() == 3) rep.max_tripod_deviation = std::max(rep.max_tripod_deviation, std::abs(gap - 2.0 * kPi / 3.0));
      if (angles.size() == 2 && std::abs(gap - kPi) > tau_angle && rep.straight) {
        rep.straight = false;
        rep.failures.push_back("straight: non-terminal vertex " + std::to_string(v) + " of degree 2 bends");
      }
    }
  }
  if (rep.min_angle < 2.0 * kPi / 3.0 - tau_angle) {
    rep.angles = false;
    rep.failures.push_back("angles: adjacent edges meet at " + std::to_string(rep.min_angle) + " < 2pi/3");
  }
  if (rep.max_tripod_deviation > tau_angle) {
    rep.tripods = false;
    rep.failures.push_back("tripods: degree-3 angle deviates from 2pi/3 by " + std::to_string(rep.max_tripod_deviation));
  }
  return rep;
}

std::vector<int> pseudo_boundary(const Network& net) {
  std::vector<int> out;
  for (int v = 0; v < net.vertex_count(); ++v)
    if (net.degree(v) == 1) out.push_back(v);
  return out;
}

std::vector<int> tree_boundary(const Network& net) {
  std::vector<int> out;
  for (int v = 0; v < net.vertex_count(); ++v)
    if (net.degree(v) == 1 || net.degree(v) == 2) out.push_back(v);
  return out;
}

PseudoNetwork::PseudoNetwork(Network n) : net(std::move(n)), boundary(pseudo_boundary(net)) {}

namespace {

int ray_or_throw(const WindRose& rose, Vec2 v, double tol) {
  if (auto k = rose.ray_of(v, tol)) return *k;
  throw NotParallel("segment direction " + std::to_string(v.angle()) + " matches no rose ray");
}

}  // namespace

bool parallel_to_rose(const PseudoNetwork& pnet, const WindRose& rose, double tol) {
  for (int e = 0; e < pnet.net.edge_count(); ++e) {
    const Edge& ed = pnet.net.edge(e);
    if (ed.kind != EdgeKind::Segment) return false;
    if (!rose.ray_of(pnet.net.vertex(ed.b) - pnet.net.vertex(ed.a), tol)) return false;
  }
  return true;
}

double condition_ii_residual(const PseudoNetwork& pnet, const WindRose& rose, double tol) {
  double worst = 0.0;
  for (int v = 0; v < pnet.net.vertex_count(); ++v) {
    if (pnet.net.degree(v) <= 1) continue;
    double sum = 0.0;
    for (int e : pnet.net.incidence()[static_cast<std::size_t>(v)])
      sum += rose.weights[static_cast<std::size_t>(ray_or_throw(rose, pnet.net.leaving_direction(e, v), tol))];
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

int rotations_satisfying_ii(const PseudoNetwork& pnet, const WindRose& rose, double tol) {
  int count = 0;
  for (int k = 0; k < 6; ++k) {
    WindRose rot = rose;
    for (int i = 0; i < 6; ++i) rot.weights[static_cast<std::size_t>(i)] = rose.weights[static_cast<std::size_t>((i + k) % 6)];
    if (condition_ii_residual(pnet, rot, tol) <= 1e-12 * (1.0 + std::abs(rose.weights[0]) + std::abs(rose.weights[1])))
      ++count;
  }
  return count;
}

double leaf_weight_sum(const PseudoNetwork& pnet, const WindRose& rose, double tol) {
  for (int e = 0; e < pnet.net.edge_count(); ++e) {
    const Edge& ed = pnet.net.edge(e);
    if (ed.kind != EdgeKind::Segment) throw NotParallel("arc edges are never parallel to a rose ray");
    ray_or_throw(rose, pnet.net.vertex(ed.b) - pnet.net.vertex(ed.a), tol);
  }
  double sum = 0.0;
  for (int v : pnet.boundary) {
    const int e = pnet.net.incidence()[static_cast<std::size_t>(v)].front();
    const Vec2 entering = -pnet.net.leaving_direction(e, v);
    sum += rose.weights[static_cast<std::size_t>(ray_or_throw(rose, entering, tol))];
  }
  return sum;
}

StlResult check_St_l(const PseudoNetwork& pnet, const Line& line, double tol_geom, double tol_angle) {
  const double len = line.direction.norm();
  if (!(len > 0.0)) throw DegenerateLine("line direction is zero");
  const Vec2 u = line.direction / len;
  auto signed_dist = [&](Point2 p) { return cross(u, p - line.point); };
  bool all_on = true, any_pos = false, any_neg = false;
  for (const Point2& p : pnet.net.vertices()) {
    const double d = signed_dist(p);
    if (std::abs(d) > tol_geom) all_on = false;
    if (d > tol_geom) any_pos = true;
    if (d < -tol_geom) any_neg = true;
  }
  if (all_on) throw DegenerateLine("network lies on the line");
  StlResult res;
  std::vector<int> off;
  for (int v : pnet.boundary) {
    if (std::abs(signed_dist(pnet.net.vertex(v))) <= tol_geom) ++res.count_on;
    else { ++res.count_off; off.push_back(v); }
  }
  res.holds = res.count_on <= 2 * res.count_off;
  res.one_side = !(any_pos && any_neg);
  res.equality = res.count_on == 2 * res.count_off;
  if (res.one_side && res.equality) {
    bool parallel = true;
    std::vector<Vec2> dirs;
    for (int v : off) dirs.push_back(pnet.net.leaving_direction(pnet.net.incidence()[static_cast<std::size_t>(v)].front(), v));
    for (std::size_t i = 1; i < dirs.size(); ++i)
      if (std::abs(cross(dirs[0], dirs[i])) > tol_angle || dot(dirs[0], dirs[i]) < 0.0) parallel = false;
    res.collinearity = parallel;
  }
  return res;
}

double mst_length(const std::vector<Point2>& pts) {
  const std::size_t n = pts.size();
  if (n < 2) return 0.0;
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<bool> in(n, false);
  best[0] = 0.0;
  double total = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i] && (u == n || best[i] < best[u])) u = i;
    in[u] = true;
    total += best[u];
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i]) best[i] = std::min(best[i], distance(pts[u], pts[i]));
  }
  return total;
}

namespace {

using TopoEdge = std::pair<int, int>;

// All full topologies over n terminals (ids 0..n-1) with Steiner points
// n..2n-3, built by inserting terminals into edges one at a time.
void enumerate_topologies(int n, std::vector<std::vector<TopoEdge>>& out) {
  std::function<void(std::vector<TopoEdge>, int)> grow = [&](std::vector<TopoEdge> edges, int next) {
    if (next == n) {
      out.push_back(std::move(edges));
      return;
    }
    const int steiner = n + next - 2;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto e2 = edges;
      const auto [a, b] = e2[i];
      e2[i] = {a, steiner};
      e2.push_back({steiner, b});
      e2.push_back({steiner, next});
      grow(std::move(e2), next + 1);
    }
  };
  grow({{0, n}, {1, n}, {2, n}}, 3);
}

double tree_length(const std::vector<Point2>& pos, const std::vector<TopoEdge>& edges) {
  double len = 0.0;
  for (const auto& [a, b] : edges) len += distance(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]);
  return len;
}

// Newton iterations on the smoothed length sum sqrt(|u - v|^2 + eps^2) over the
// free points (ids >= first_free). eps = 0 gives the plain length, which is
// smooth while no edge at a free point degenerates.
void newton_polish(std::vector<Point2>& pos, const std::vector<TopoEdge>& edges, int first_free, double eps,
                   int iterations) {
  const int m = static_cast<int>(pos.size()) - first_free;
  if (m <= 0) return;
  auto smooth_len = [&](const std::vector<Point2>& p) {
    double s = 0.0;
    for (const auto& [a, b] : edges) s += std::sqrt((p[static_cast<std::size_t>(a)] - p[static_cast<std::size_t>(b)]).norm2() + eps * eps);
    return s;
  };
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * m);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (const auto& [a, b] : edges) {
      const Vec2 d = pos[static_cast<std::size_t>(a)] - pos[static_cast<std::size_t>(b)];
      const double l = std::sqrt(d.norm2() + eps * eps);
      if (!(l > 0.0)) continue;
      Eigen::Vector2d dv(d.x, d.y);
      const Eigen::Matrix2d block = (Eigen::Matrix2d::Identity() * l * l - dv * dv.transpose()) / (l * l * l);
      const int ia = a - first_free, ib = b - first_free;
      if (ia >= 0) { g.segment<2>(2 * ia) += dv / l; H.block<2, 2>(2 * ia, 2 * ia) += block; }
      if (ib >= 0) { g.segment<2>(2 * ib) -= dv / l; H.block<2, 2>(2 * ib, 2 * ib) += block; }
      if (ia >= 0 && ib >= 0) {
        H.block<2, 2>(2 * ia, 2 * ib) -= block;
        H.block<2, 2>(2 * ib, 2 * ia) -= block;
      }
    }
    if (g.norm() < 1e-15) break;
    H += Eigen::MatrixXd::Identity(2 * m, 2 * m) * 1e-14;
    Eigen::VectorXd step = H.ldlt().solve(-g);
    if (!step.allFinite() || step.dot(g) >= 0.0) step = -g;
    const double f0 = smooth_len(pos);
    double t = 1.0;
    std::vector<Point2> trial = pos;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      for (int i = 0; i < m; ++i)
        trial[static_cast<std::size_t>(first_free + i)] =
            pos[static_cast<std::size_t>(first_free + i)] + Vec2{step(2 * i), step(2 * i + 1)} * t;
      if (smooth_len(trial) <= f0 + 1e-4 * t * step.dot(g)) { accepted = true; break; }
    }
    if (!accepted) break;
    pos = trial;
    if (t * step.norm() < 1e-16 * (1.0 + pos[static_cast<std::size_t>(first_free)].norm())) break;
  }
}

}  // namespace

double polish_tree(std::vector<Point2>& pos, const std::vector<std::pair<int, int>>& edges, int first_free) {
  double scale = 0.0;
  for (const auto& [a, b] : edges) scale = std::max(scale, distance(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]));
  if (!(scale > 0.0)) return 0.0;
  for (double eps = 1e-2 * scale; eps > 1e-13 * scale; eps *= 0.1) newton_polish(pos, edges, first_free, eps, 50);
  return tree_length(pos, edges);
}

Network exact_steiner_small(const std::vector<Point2>& terminals) {
  const int n = static_cast<int>(terminals.size());
  if (n > 5) throw TooManyTerminals(std::to_string(n) + " terminals; at most 5 are supported");
  if (n < 2) throw Error("exact_steiner_small needs at least 2 terminals");
  if (n == 2) return Network(terminals, {Edge::segment(0, 1)});

  double scale = 0.0;
  Point2 centroid;
  for (const Point2& t : terminals) centroid += t / n;
  for (const Point2& t : terminals) scale = std::max(scale, distance(t, centroid));
  if (!(scale > 0.0)) throw Error("terminals coincide");

  std::vector<std::vector<TopoEdge>> topologies;
  enumerate_topologies(n, topologies);
  double best_len = std::numeric_limits<double>::infinity();
  std::vector<Point2> best_pos;
  std::vector<TopoEdge> best_edges;
  for (const auto& edges : topologies) {
    std::vector<Point2> pos = terminals;
    pos.resize(static_cast<std::size_t>(2 * n - 2), centroid);
    // Seed Steiner points at the average of their terminal neighbours.
    for (int s = n; s < 2 * n - 2; ++s) {
      Vec2 sum;
      int cnt = 0;
      for (const auto& [a, b] : edges) {
        if (a == s && b < n) { sum += terminals[static_cast<std::size_t>(b)]; ++cnt; }
        if (b == s && a < n) { sum += terminals[static_cast<std::size_t>(a)]; ++cnt; }
      }
      pos[static_cast<std::size_t>(s)] = cnt > 0 ? (sum / cnt + centroid) * 0.5 : centroid;
    }
    for (double eps = 1e-2 * scale; eps > 1e-13 * scale; eps *= 0.1) newton_polish(pos, edges, n, eps, 50);
    const double len = tree_length(pos, edges);
    if (len < best_len - 1e-13 * scale) {
      best_len = len;
      best_pos = pos;
      best_edges = edges;
    }
  }

  // Contract degenerate edges at Steiner points: a Steiner point sitting on a
  // terminal or on another Steiner point is merged into it.
  std::vector<int> rep(best_pos.size());
  std::iota(rep.begin(), rep.end(), 0);
  auto root = [&](int x) {
    while (rep[static_cast<std::size_t>(x)] != x) x = rep[static_cast<std::size_t>(x)];
    return x;
  };
  const double collapse = 1e-6 * scale;
  for (const auto& [a, b] : best_edges) {
    const int ra = root(a), rb = root(b);
    if (ra == rb || distance(best_pos[static_cast<std::size_t>(ra)], best_pos[static_cast<std::size_t>(rb)]) > collapse) continue;
    if (ra >= n && rb >= n) rep[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    else if (ra >= n) rep[static_cast<std::size_t>(ra)] = rb;
    else if (rb >= n) rep[static_cast<std::size_t>(rb)] = ra;
  }
  std::map<int, int> index;
  std::vector<Point2> verts;
  for (int i = 0; i < n; ++i) { index[i] = i; verts.push_back(terminals[static_cast<std::size_t>(i)]); }
  for (int s = n; s < static_cast<int>(best_pos.size()); ++s)
    if (root(s) == s) { index[s] = static_cast<int>(verts.size()); verts.push_back(best_pos[static_cast<std::size_t>(s)]); }
  std::vector<TopoEdge> reduced;
  for (const auto& [a, b] : best_edges) {
    const int ra = index.at(root(a)), rb = index.at(root(b));
    if (ra != rb) reduced.push_back({ra, rb});
  }
  newton_polish(verts, reduced, n, 0.0, 30);
  std::vector<Edge> out_edges;
  for (const auto& [a, b] : reduced) out_edges.push_back(Edge::segment(a, b));
  return Network(std::move(verts), std::move(out_edges));
}

std::vector<Network> full_components(const Network& tree, int terminal_count) {
  const int ne = tree.edge_count();
  std::vector<int> parent(static_cast<std::size_t>(ne));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  for (int v = terminal_count; v < tree.vertex_count(); ++v) {
    const auto& inc = tree.incidence()[static_cast<std::size_t>(v)];
    for (std::size_t i = 1; i < inc.size(); ++i) parent[static_cast<std::size_t>(find(inc[i]))] = find(inc[0]);
  }
  std::map<int, std::vector<int>> groups;
  for (int e = 0; e < ne; ++e) groups[find(e)].push_back(e);
  std::vector<Network> out;
  for (const auto& [root, edges] : groups) {
    std::map<int, int> remap;
    std::vector<Point2> verts;
    std::vector<Edge> es;
    auto id = [&](int v) {
      auto it = remap.find(v);
      if (it != remap.end()) return it->second;
      const int k = static_cast<int>(verts.size());
      remap[v] = k;
      verts.push_back(tree.vertex(v));
      return k;
    };
    for (int e : edges) {
      Edge ed = tree.edge(e);
      ed.a = id(ed.a);
      ed.b = id(ed.b);
      es.push_back(ed);
    }
    out.emplace_back(std::move(verts), std::move(es));
  }
  return out;
}

std::vector<Network> cut_by_line(const Network& tree, const Line& line, double tol_geom) {
  const Vec2 u = normalized(line.direction);
  auto sd = [&](Point2 p) { return cross(u, p - line.point); };
  struct HalfEdge {
    Point2 p, q;      // p off the line, q off the line or on it
    int vp, vq;       // original vertex ids, -1 for cut points
    int side;
  };
  std::vector<HalfEdge> parts;
  for (int e = 0; e < tree.edge_count(); ++e) {
    const Edge& ed = tree.edge(e);
    const Point2 a = tree.vertex(ed.a), b = tree.vertex(ed.b);
    double da = sd(a), db = sd(b);
    const int sa = da > tol_geom ? 1 : (da < -tol_geom ? -1 : 0);
    const int sb = db > tol_geom ? 1 : (db < -tol_geom ? -1 : 0);
    if (sa == 0 && sb == 0) continue;
    if (sa == 0) { parts.push_back({b, a, ed.b, ed.a, sb}); continue; }
    if (sb == 0 || sa == sb) { parts.push_back({a, b, ed.a, ed.b, sa}); continue; }
    const Point2 c = a + (b - a) * (da / (da - db));
    parts.push_back({a, c, ed.a, -1, sa});
    parts.push_back({b, c, ed.b, -1, sb});
  }
  // Parts are joined through shared off-line original vertices.
  std::vector<int> parent(parts.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  std::map<int, int> owner;
  auto join = [&](int part, int v, Point2 pos) {
    if (v < 0 || std::abs(sd(pos)) <= tol_geom) return;
    auto it = owner.find(v);
    if (it == owner.end()) owner[v] = part;
    else parent[static_cast<std::size_t>(find(part))] = find(it->second);
  };
  for (int i = 0; i < static_cast<int>(parts.size()); ++i) {
    join(i, parts[static_cast<std::size_t>(i)].vp, parts[static_cast<std::size_t>(i)].p);
    join(i, parts[static_cast<std::size_t>(i)].vq, parts[static_cast<std::size_t>(i)].q);
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(parts.size()); ++i) groups[find(i)].push_back(i);
  std::vector<Network> out;
  for (const auto& [root, members] : groups) {
    std::vector<Point2> verts;
    std::vector<Edge> es;
    std::map<int, int> orig;
    auto id = [&](int v, Point2 pos) {
      if (v >= 0) {
        auto it = orig.find(v);
        if (it != orig.end()) return it->second;
      } else {
        for (int k = 0; k < static_cast<int>(verts.size()); ++k)
          if (distance(verts[static_cast<std::size_t>(k)], pos) <= tol_geom) return k;
      }
      const int k = static_cast<int>(verts.size());
      verts.push_back(pos);
      if (v >= 0) orig[v] = k;
      return k;
    };
    for (int i : members) {
      const HalfEdge& h = parts[static_cast<std::size_t>(i)];
      es.push_back(Edge::segment(id(h.vp, h.p), id(h.vq, h.q)));
    }
    out.emplace_back(std::move(verts), std::move(es));
  }
  return out;
}

}  // namespace mdm
