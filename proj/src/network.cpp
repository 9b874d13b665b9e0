#include "mdm/network.hpp"

#include <algorithm>
#include <numeric>

#include "mdm/errors.hpp"

namespace mdm {

Network::Network(std::vector<Point2> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), incidence_(vertices_.size()) {
  for (int e = 0; e < edge_count(); ++e) {
    const Edge& ed = edges_[static_cast<std::size_t>(e)];
    if (ed.a < 0 || ed.b < 0 || ed.a >= vertex_count() || ed.b >= vertex_count())
      throw InvalidNetwork("edge " + std::to_string(e) + " references a missing vertex");
    incidence_[static_cast<std::size_t>(ed.a)].push_back(e);
    if (ed.b != ed.a) incidence_[static_cast<std::size_t>(ed.b)].push_back(e);
  }
}

int Network::other_end(int e, int v) const {
  const Edge& ed = edge(e);
  return ed.a == v ? ed.b : ed.a;
}

ArcGeom Network::arc_geom(int e) const {
  const Edge& ed = edge(e);
  const Vec2 ra = vertex(ed.a) - ed.center, rb = vertex(ed.b) - ed.center;
  const double ta = ra.angle(), tb = rb.angle();
  const double sweep = ed.ccw ? wrap_two_pi(tb - ta) : -wrap_two_pi(ta - tb);
  return {ed.center, 0.5 * (ra.norm() + rb.norm()), ta, sweep};
}

double Network::edge_length(int e) const {
  const Edge& ed = edge(e);
  if (ed.kind == EdgeKind::Segment) return distance(vertex(ed.a), vertex(ed.b));
  return arc_geom(e).length();
}

Point2 Network::edge_point(int e, double t) const {
  const Edge& ed = edge(e);
  if (ed.kind == EdgeKind::Segment) return vertex(ed.a) + (vertex(ed.b) - vertex(ed.a)) * t;
  if (t <= 0.0) return vertex(ed.a);
  if (t >= 1.0) return vertex(ed.b);
  return arc_geom(e).at(t);
}

Vec2 Network::leaving_direction(int e, int v) const {
  const Edge& ed = edge(e);
  const int w = other_end(e, v);
  if (ed.kind == EdgeKind::Segment) return normalized(vertex(w) - vertex(v));
  // Tangent of the arc at v, oriented into the edge.
  const Vec2 radial = vertex(v) - ed.center;
  const bool forward_ccw = (v == ed.a) == ed.ccw;
  const Vec2 t = normalized(perp(radial));
  return forward_ccw ? t : -t;
}

ClosestPoint Network::closest_on_edge(int e, Point2 p) const {
  const Edge& ed = edge(e);
  if (ed.kind == EdgeKind::Segment) return closest_on_segment(p, vertex(ed.a), vertex(ed.b));
  return closest_on_arc(p, arc_geom(e));
}

int Network::segment_count() const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                        [](const Edge& e) { return e.kind == EdgeKind::Segment; }));
}

int Network::arc_count() const { return edge_count() - segment_count(); }

StructureReport check_structure(const Network& net) {
  StructureReport rep;
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    rep.failures.push_back(std::move(msg));
  };
  if (net.vertex_count() == 0) {
    fail(rep.nonempty, "empty: network has no vertices");
    return rep;
  }
  for (int e = 0; e < net.edge_count(); ++e) {
    const Edge& ed = net.edge(e);
    if (ed.a == ed.b) fail(rep.incidence, "incidence: edge " + std::to_string(e) + " is a loop");
    if (ed.kind == EdgeKind::Arc) {
      const double ra = distance(net.vertex(ed.a), ed.center), rb = distance(net.vertex(ed.b), ed.center);
      if (std::abs(ra - rb) > kTauGeom * std::max(1.0, ra))
        fail(rep.incidence, "incidence: arc " + std::to_string(e) + " endpoints are not equidistant from its centre");
    }
  }
  std::vector<int> parent(static_cast<std::size_t>(net.vertex_count()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const Edge& ed : net.edges()) {
    const int ra = find(ed.a), rb = find(ed.b);
    if (ra == rb) {
      if (rep.acyclic) fail(rep.acyclic, "acyclicity: network contains a cycle");
    } else {
      parent[static_cast<std::size_t>(ra)] = rb;
    }
  }
  const int root = find(0);
  for (int v = 1; v < net.vertex_count(); ++v)
    if (find(v) != root) {
      fail(rep.connected, "connectivity: network is disconnected");
      break;
    }
  for (int v = 0; v < net.vertex_count(); ++v)
    if (net.degree(v) > 3) {
      fail(rep.degree, "degree: vertex " + std::to_string(v) + " has degree " + std::to_string(net.degree(v)));
      break;
    }
  return rep;
}

void require_valid(const Network& net) {
  const auto rep = check_structure(net);
  if (!rep.ok()) throw InvalidNetwork(rep.failures.front());
}

double total_length(const Network& net) {
  double sum = 0.0;
  for (int e = 0; e < net.edge_count(); ++e) sum += net.edge_length(e);
  return sum;
}

Network rigid_transform(const Network& net, double theta, Vec2 shift) {
  std::vector<Point2> verts;
  verts.reserve(net.vertices().size());
  for (const Point2& p : net.vertices()) verts.push_back(rotate(p, theta) + shift);
  std::vector<Edge> edges = net.edges();
  for (Edge& e : edges)
    if (e.kind == EdgeKind::Arc) e.center = rotate(e.center, theta) + shift;
  return Network(std::move(verts), std::move(edges));
}

AngleReport angle_report(const Network& net, const std::vector<int>& skip) {
  AngleReport rep;
  for (int v = 0; v < net.vertex_count(); ++v) {
    if (net.degree(v) < 2 || std::find(skip.begin(), skip.end(), v) != skip.end()) continue;
    std::vector<double> angles;
    for (int e : net.incidence()[static_cast<std::size_t>(v)]) angles.push_back(net.leaving_direction(e, v).angle());
    std::sort(angles.begin(), angles.end());
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const double next = i + 1 < angles.size() ? angles[i + 1] : angles[0] + kTwoPi;
      const double gap = next - angles[i];
      // For degree 2 only the smaller of the two gaps is an angle between edges.
      const double adj = angles.size() == 2 ? std::min(gap, kTwoPi - gap) : gap;
      if (adj < rep.min_adjacent_angle) {
        rep.min_adjacent_angle = adj;
        rep.worst_vertex = v;
      }
      if (angles.size() == 3) rep.max_tripod_deviation = std::max(rep.max_tripod_deviation, std::abs(gap - 2.0 * kPi / 3.0));
    }
  }
  return rep;
}

}  // namespace mdm
