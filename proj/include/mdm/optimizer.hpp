#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdm/curve.hpp"
#include "mdm/network.hpp"

namespace mdm {

enum class VertexMode {
  Free,     // two coordinates
  Pinned,   // fixed
  Sliding,  // one arclength coordinate on the slide curve (M_r by default)
  Tied,     // copy of `master` translated by shift * (period, 0)
  Polar,    // master + length * rotate(unit(ref - master), angle): one length coordinate
};

/// Polar vertices hold an exact angle at `master` against the edge towards
/// `ref` (for instance 2pi/3 at a Steiner point); master and ref must be
/// Free, Pinned or Sliding.
struct VertexControl {
  VertexMode mode = VertexMode::Free;
  int master = -1;
  int shift = 0;
  int ref = -1;
  double angle = 0.0;
};

/// Periodic strip between two horizontal walls (the straight part of a long
/// stadium). The network is one cell; coverage is checked against the cell and
/// its translates by multiples of (period, 0).
struct PeriodicCell {
  double wall_low = 0.0;
  double wall_high = 0.0;
  double period = 1.0;
  bool optimize_period = false;  // minimize length / period instead of length
  int images = 2;
};

struct OptimizationProblem {
  std::optional<ConvexCurve> curve;   // coverage of a closed curve
  std::optional<PeriodicCell> cell;   // or of a periodic strip
  double r = 1.0;
  Network net;
  std::vector<VertexControl> controls;  // empty: every vertex free
  std::optional<ConvexCurve> slide_curve;
  double mu_start = 1e2;   // penalty weights in units of 1/r^2
  double mu_end = 1e8;
  double mu_factor = 10.0;
  int n_samples = 4096;
  double violation_tol_rel = 1e-7;  // target max violation, times r
  double grad_tol = 1e-11;
  int max_iterations = 3000;        // per penalty stage
  double start_slack_rel = 0.1;     // InfeasibleStart beyond r (1 + slack)
  int polish_rounds = 12;           // augmented Lagrangian rounds after the penalty stages
  double polish_mu = 1e5;
};

struct TraceEntry {
  int iteration = 0;
  int stage = 0;
  double mu = 0.0;
  double length = 0.0;
  double violation = 0.0;  // max(dist - r) over the stage's samples
  double gradnorm = 0.0;
  double objective = 0.0;  // penalized objective (dimensionless)
};

struct OptimizationTrace {
  std::vector<TraceEntry> entries;
  std::string termination;
  double final_violation = 0.0;       // on the working lattice plus witnesses
  double final_violation_fine = 0.0;  // on an 8x denser lattice
};

struct OptimizationResult {
  Network net;
  OptimizationTrace trace;
  double period = 0.0;  // final period for periodic problems
};

/// Penalized quasi-Newton minimization of network length subject to coverage
/// within r, topology fixed. The objective is L/r + mu * sum((d_k - r)_+ / r)^2
/// over the sample lattice augmented with refined local-maximum witnesses;
/// mu runs from mu_start to mu_end by mu_factor. Without curve and cell the
/// problem is plain length minimization. Throws InfeasibleStart, Diverged.
OptimizationResult minimize_length(const OptimizationProblem& problem);

/// Exposes the penalized objective for gradient checks.
class PenaltyObjective {
 public:
  explicit PenaltyObjective(const OptimizationProblem& problem);
  ~PenaltyObjective();
  PenaltyObjective(const PenaltyObjective&) = delete;
  PenaltyObjective& operator=(const PenaltyObjective&) = delete;

  std::vector<double> initial_point() const;
  double value(const std::vector<double>& theta, std::vector<double>* grad) const;
  void set_mu(double mu);
  /// Re-derives witness samples at theta.
  void refresh_witnesses(const std::vector<double>& theta);
  Network network_at(const std::vector<double>& theta) const;
  std::size_t dimension() const;

  struct Impl;

 private:
  Impl* impl_;
  friend OptimizationResult minimize_length(const OptimizationProblem& problem);
};

/// Collapses edges shorter than collapse_rel * r and splits every resulting
/// degree-4 vertex into two junctions joined by a short edge, choosing the
/// pairing of neighbours with the smaller local Steiner length.
Network merge_pass(const Network& net, double r, double collapse_rel = 1e-4);

}  // namespace mdm
