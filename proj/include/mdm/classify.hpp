#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdm/curve.hpp"
#include "mdm/network.hpp"

namespace mdm {

enum class PointClass { Energetic, Steiner, Entering };

const char* to_string(PointClass c);

struct CorrespondingPoint {
  Point2 y;
  double s = 0.0;       // arclength position on M
  bool smooth = true;   // false at a corner of M
};

/// Classification of one network point: a vertex, or an interior point of an
/// edge where some ball B_r(y) touches Σ.
struct EnergeticRecord {
  Point2 x;
  int vertex = -1;  // -1 for edge-interior points
  int edge = -1;    // carrying edge for edge-interior points
  PointClass cls = PointClass::Steiner;
  std::vector<CorrespondingPoint> corresponding;
  int degree = 0;
  bool on_offset = false;  // lies on M_r
  /// 1..4 from degree x corresponding-point count, when all corresponding
  /// points are smooth and at most two.
  std::optional<int> case_id;
};

struct ClassifyOptions {
  int n_samples = 4096;      // lattice for the coverage precondition
  int search_samples = 8192; // lattice for the corresponding-point search
  double tau_class_rel = kTauClassRel;
};

/// Classifies every vertex and every edge-interior contact point. Edges marked
/// all_energetic (and arcs detected to lie on M_r with empty balls) are
/// reported through the network's edge flags and contribute no interior
/// records. Throws CoverageViolation if F_M(net) > r + Per/n_samples and
/// InvalidNetwork if the network fails its structural invariants.
std::vector<EnergeticRecord> classify_points(const Network& net, const ConvexCurve& curve, double r,
                                             const ClassifyOptions& opt = {});

/// Corresponding points of x: curve points y with |x - y| = r and
/// dist(y, Σ) = r, both within tau.
std::vector<CorrespondingPoint> find_corresponding(const Network& net, const ConvexCurve& curve, double r, Point2 x,
                                                   double tau, int samples = 8192);

/// Whether every point of an arc edge lies on M_r with an empty ball.
bool arc_is_all_energetic(const Network& net, int edge, const ConvexCurve& curve, double r, double tau);

struct ComponentReport {
  std::vector<int> edges;                  // edges meeting the component
  std::vector<Point2> entering;            // points of S on M_r
  std::vector<Point2> energetic;           // energetic points of S off M_r
  std::vector<Point2> hull;                // convex hull vertices of S
  int entering_hull_vertices = 0;
  int unclassified_hull_vertices = 0;      // hull vertices neither energetic nor entering
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// One report per closure of a connected component of Σ minus N_r. Edges are
/// clipped at the boundary of N_r by bisection on the depth function.
std::vector<ComponentReport> component_diagnostics(const Network& net, const ConvexCurve& curve, double r,
                                                   const std::vector<EnergeticRecord>& records,
                                                   double tau_rel = kTauClassRel);

}  // namespace mdm
