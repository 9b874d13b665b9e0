#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mdm/network.hpp"

namespace mdm {

/// Six rays at angles base_angle + k*pi/3 with weights obeying
/// w(k) = w(k-1) + w(k+1).
struct WindRose {
  Point2 origin;
  double base_angle = 0.0;
  std::array<double, 6> weights{};

  double ray_angle(int k) const { return base_angle + k * kPi / 3.0; }
  /// Index of the ray parallel to (same direction as) v, within tol radians.
  std::optional<int> ray_of(Vec2 v, double tol = kTauAngle) const;
  /// Adjacency-law residual max_k |w(k) - w(k-1) - w(k+1)|.
  double adjacency_residual() const;
};

/// Full weight vector from two consecutive weights:
/// (w0, w1, w1 - w0, -w0, -w1, w0 - w1).
WindRose make_wind_rose(double base_angle, double w0, double w1, Point2 origin = {});

struct ValidationReport {
  bool acyclic = true;
  bool segments_only = true;
  bool angles = true;         // adjacent-edge angles >= 2pi/3 at non-terminals
  bool tripods = true;        // degree-3 non-terminals have exact 2pi/3 angles
  bool straight = true;       // degree-2 non-terminals are straight
  bool terminals = true;      // every terminal lies on the network
  double min_angle = kPi;
  double max_tripod_deviation = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

ValidationReport validate_local_steiner(const Network& net, const std::vector<Point2>& terminals,
                                        double tau_angle = kTauAngle);

/// Vertices of degree 1 (the pseudo-network boundary).
std::vector<int> pseudo_boundary(const Network& net);
/// Vertices of degree 1 or 2 (the tree boundary used for local Steiner trees).
std::vector<int> tree_boundary(const Network& net);

/// A segment network together with its degree-1 boundary.
struct PseudoNetwork {
  Network net;
  std::vector<int> boundary;

  explicit PseudoNetwork(Network n);
};

/// Whether every edge is parallel to a rose ray (condition (i)).
bool parallel_to_rose(const PseudoNetwork& pnet, const WindRose& rose, double tol = kTauAngle);
/// Max |sum of weights toward neighbours| over non-boundary vertices
/// (condition (ii)). Throws NotParallel when condition (i) fails.
double condition_ii_residual(const PseudoNetwork& pnet, const WindRose& rose, double tol = kTauAngle);
/// Whether some rotation of the rose by a multiple of pi/3 (that is, a cyclic
/// shift of its weights) also satisfies condition (ii); returns the count of
/// the six rotations that do.
int rotations_satisfying_ii(const PseudoNetwork& pnet, const WindRose& rose, double tol = kTauAngle);

/// Sum over boundary vertices of the weight of the ray parallel to the edge
/// directed into the vertex. Throws NotParallel.
double leaf_weight_sum(const PseudoNetwork& pnet, const WindRose& rose, double tol = kTauAngle);

struct Line {
  Point2 point;
  Vec2 direction;  // need not be unit
};

struct StlResult {
  int count_on = 0;
  int count_off = 0;
  bool holds = true;
  bool one_side = false;              // network in one closed half-plane
  bool equality = false;
  std::optional<bool> collinearity;   // set when one_side && equality
};

/// Counts boundary vertices on and off the line (membership within tol_geom)
/// and checks count_on <= 2 count_off. Throws DegenerateLine if the whole
/// network lies on the line or the direction is zero.
StlResult check_St_l(const PseudoNetwork& pnet, const Line& line, double tol_geom = kTauGeom,
                     double tol_angle = kTauAngle);

/// Globally minimal Steiner tree for 2 to 5 terminals. Terminals are the first
/// vertices of the returned network, Steiner points follow. Throws
/// TooManyTerminals for more than 5 and Error for fewer than 2.
Network exact_steiner_small(const std::vector<Point2>& terminals);

/// Minimizes the length of a fixed-topology tree over the points with index
/// >= first_free (smoothed Newton continuation). Returns the final length.
double polish_tree(std::vector<Point2>& positions, const std::vector<std::pair<int, int>>& edges, int first_free);

/// Euclidean minimum spanning tree length (Prim).
double mst_length(const std::vector<Point2>& points);

/// Splits a tree at vertices in `terminals` of degree >= 2, returning the full
/// components (each a tree whose terminals are leaves).
std::vector<Network> full_components(const Network& tree, int terminal_count);

/// Closures of the components of T minus the line lying strictly on one side,
/// with cut points added as new leaves.
std::vector<Network> cut_by_line(const Network& tree, const Line& line, double tol_geom = kTauGeom);

}  // namespace mdm
