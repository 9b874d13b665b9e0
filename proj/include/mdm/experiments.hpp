#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mdm/derivative.hpp"
#include "mdm/io.hpp"

namespace mdm {

// A scalar output. Checked scalars carry the target and the tolerance they
// were judged under; unchecked ones are diagnostics.
struct Scalar {
  std::string name;
  double value = 0.0;
  bool checked = false;
  double target = 0.0;
  double tol = 0.0;
  std::string relation = "abs";  // "abs": |value - target| <= tol; "le": value <= target + tol; "ge": value >= target - tol
  bool pass = true;
};

struct ExperimentResult {
  std::string name;
  std::vector<Scalar> scalars;
  std::vector<std::string> artifacts;
  std::vector<std::string> notes;
  bool pass() const;
  const Scalar* find(const std::string& name) const;
};

struct ExperimentOptions {
  std::string out_dir;      // artifacts are skipped when empty
  std::uint64_t seed = 0;
  int samples = 0;          // 0: per-experiment default
  int instances = 10000;    // steiner-properties suite size
  int configs = 100;        // derivative-oracle configurations per case
};

Scalar check_abs(std::string name, double value, double target, double tol);
Scalar check_le(std::string name, double value, double bound);
Scalar check_ge(std::string name, double value, double bound);
Scalar info(std::string name, double value);
Json to_json(const ExperimentResult& res);

const std::vector<std::string>& experiment_names();
// Throws Error for an unknown name.
ExperimentResult run_experiment(const std::string& name, const ExperimentOptions& opt);

ExperimentResult run_rectangle_constant(const ExperimentOptions& opt);
ExperimentResult run_stadium_threshold(const ExperimentOptions& opt);
// Stationarity and component diagnostics on the horseshoe (circle R = 5r) and
// the rectangle networks.
ExperimentResult run_horseshoe_stationarity(const ExperimentOptions& opt);
// Wind-rose / St_l suite on exact small Steiner trees, and the exact lengths
// of the equilateral triangle and unit square.
ExperimentResult run_steiner_properties(const ExperimentOptions& opt);
ExperimentResult run_derivative_oracle(const ExperimentOptions& opt);

// Random well-posed local scene for case 1..4 on a circle of radius 3..8
// with r = 1.
LocalScene random_local_scene(int case_id, std::mt19937_64& rng);

// First upward crossing of c = 2 by linear interpolation; NaN if none.
double crossing_of_two(const std::vector<SweepRow>& rows);

}  // namespace mdm
