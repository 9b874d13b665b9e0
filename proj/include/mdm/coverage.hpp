#pragma once

#include <vector>

#include "mdm/curve.hpp"
#include "mdm/kernels/segment_distance.hpp"
#include "mdm/network.hpp"

namespace mdm {

struct NetworkDistance {
  double distance = 0.0;
  Point2 point;      // realizing closest point on the network
  int edge = -1;     // -1 when the network is a lone vertex
  double param = 0;  // fraction along the edge
};

/// Precomputed distance structure: segments go through the vectorized
/// nearest-segment kernel, arcs are checked exactly one by one.
class DistanceIndex {
 public:
  explicit DistanceIndex(const Network& net);
  /// Throws EmptyNetwork for a network without vertices.
  NetworkDistance query(Point2 p) const;
  const Network& network() const { return *net_; }

 private:
  const Network* net_;
  kernels::SegmentSoA segs_;
  std::vector<int> seg_edge_;
  std::vector<int> arc_edges_;
};

/// Exact distance from p to the union of the network's edges (or its lone
/// vertex). Throws EmptyNetwork.
NetworkDistance dist_point_to_network(Point2 p, const Network& net);

struct FunctionalValue {
  double value = 0.0;  // max sampled distance
  Point2 argmax;
  double s = 0.0;      // curve arclength of the argmax sample
};

/// Maximum over n arclength-uniform curve samples of the distance to the
/// network. n must be at least 64. An empty network has F = infinity, which
/// is signalled by throwing EmptyNetwork.
FunctionalValue max_distance_functional(const ConvexCurve& curve, const Network& net, int n_samples);

}  // namespace mdm
