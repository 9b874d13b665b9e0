#include "mdm/coverage.hpp"

#include <cmath>
#include <limits>

#include "mdm/errors.hpp"
#include "mdm/parallel.hpp"

namespace mdm {

DistanceIndex::DistanceIndex(const Network& net) : net_(&net) {
  for (int e = 0; e < net.edge_count(); ++e) {
    const Edge& ed = net.edge(e);
    if (ed.kind == EdgeKind::Segment) {
      const Point2 a = net.vertex(ed.a), b = net.vertex(ed.b);
      segs_.push(a.x, a.y, b.x, b.y);
      seg_edge_.push_back(e);
    } else {
      arc_edges_.push_back(e);
    }
  }
  segs_.finalize();
}

NetworkDistance DistanceIndex::query(Point2 p) const {
  const Network& net = *net_;
  if (net.vertex_count() == 0) throw EmptyNetwork("distance to an empty network is undefined");
  NetworkDistance best{std::numeric_limits<double>::infinity(), {}, -1, 0.0};
  if (net.edge_count() == 0) {
    for (const Point2& v : net.vertices()) {
      const double d = distance(p, v);
      if (d < best.distance) best = {d, v, -1, 0.0};
    }
    return best;
  }
  if (segs_.count > 0) {
    const auto hit = kernels::nearest_segment(segs_, p.x, p.y);
    const int e = seg_edge_[static_cast<std::size_t>(hit.index)];
    const std::size_t i = static_cast<std::size_t>(hit.index);
    const Point2 c{segs_.ax[i] + hit.t * segs_.ex[i], segs_.ay[i] + hit.t * segs_.ey[i]};
    best = {std::sqrt(hit.dist2), c, e, hit.t};
  }
  for (int e : arc_edges_) {
    const auto cp = closest_on_arc(p, net.arc_geom(e));
    if (cp.distance < best.distance) best = {cp.distance, cp.point, e, cp.param};
  }
  return best;
}

NetworkDistance dist_point_to_network(Point2 p, const Network& net) { return DistanceIndex(net).query(p); }

FunctionalValue max_distance_functional(const ConvexCurve& curve, const Network& net, int n_samples) {
  if (n_samples < 64) throw Error("max_distance_functional needs at least 64 samples");
  if (net.vertex_count() == 0) throw EmptyNetwork("F_M of the empty set is infinite");
  const DistanceIndex index(net);
  const double per = curve.perimeter();
  const std::size_t n = static_cast<std::size_t>(n_samples);
  std::vector<double> dist(n);
  std::vector<Point2> pts(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      pts[i] = curve.point(per * static_cast<double>(i) / static_cast<double>(n));
      dist[i] = index.query(pts[i]).distance;
    }
  });
  FunctionalValue out{-1.0, {}, 0.0};
  for (std::size_t i = 0; i < n; ++i)
    if (dist[i] > out.value) out = {dist[i], pts[i], per * static_cast<double>(i) / static_cast<double>(n)};
  return out;
}

}  // namespace mdm
