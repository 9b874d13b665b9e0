#pragma once

#include <string>
#include <vector>

#include "mdm/geometry.hpp"

namespace mdm {

enum class EdgeKind { Segment, Arc };

/// Edge between vertices a and b. Arcs are circular, centred at `center`, and
/// run from a to b counterclockwise when `ccw` is set (clockwise otherwise).
/// `all_energetic` marks an edge every point of which is energetic (for
/// instance an arc of M_r in a horseshoe).
struct Edge {
  int a = 0;
  int b = 0;
  EdgeKind kind = EdgeKind::Segment;
  Point2 center;
  bool ccw = true;
  bool all_energetic = false;

  static Edge segment(int a, int b) { return {a, b, EdgeKind::Segment, {}, true, false}; }
  static Edge arc(int a, int b, Point2 center, bool ccw) { return {a, b, EdgeKind::Arc, center, ccw, false}; }
};

/// Embedded planar network. Construction does not validate; see
/// check_structure / require_valid.
class Network {
 public:
  Network() = default;
  Network(std::vector<Point2> vertices, std::vector<Edge> edges);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  Point2 vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool empty() const { return edges_.empty() && vertices_.empty(); }

  /// Incident edge ids per vertex.
  const std::vector<std::vector<int>>& incidence() const { return incidence_; }
  int degree(int v) const { return static_cast<int>(incidence_[static_cast<std::size_t>(v)].size()); }
  int other_end(int e, int v) const;

  /// Arc geometry of an arc edge (start at vertex a).
  ArcGeom arc_geom(int e) const;
  double edge_length(int e) const;
  /// Point at fraction t in [0, 1] along the edge from a to b.
  Point2 edge_point(int e, double t) const;
  /// Unit tangent leaving vertex v along edge e.
  Vec2 leaving_direction(int e, int v) const;
  ClosestPoint closest_on_edge(int e, Point2 p) const;

  int segment_count() const;
  int arc_count() const;

 private:
  std::vector<Point2> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incidence_;
};

struct StructureReport {
  bool nonempty = true;
  bool incidence = true;   // arc endpoints equidistant from the centre, no loops
  bool connected = true;
  bool acyclic = true;
  bool degree = true;      // every vertex degree <= 3
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

StructureReport check_structure(const Network& net);
/// Throws InvalidNetwork naming the first failed property.
void require_valid(const Network& net);

double total_length(const Network& net);

/// Rotation by `theta` about the origin followed by translation.
Network rigid_transform(const Network& net, double theta, Vec2 shift);

/// Adjacent-edge angle statistics at vertices of degree >= 2.
struct AngleReport {
  double min_adjacent_angle = kPi;   // smallest angle between consecutive edges at any vertex of degree >= 2
  double max_tripod_deviation = 0.0; // max |angle - 2pi/3| at degree-3 vertices
  int worst_vertex = -1;
};

/// Angles are measured between leaving tangents. `skip` lists vertices to
/// ignore (terminals).
AngleReport angle_report(const Network& net, const std::vector<int>& skip = {});

}  // namespace mdm
