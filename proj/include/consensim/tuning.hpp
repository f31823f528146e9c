#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "consensim/engine.hpp"

namespace consensim {

/// Euclidean projection of v onto the l1 ball of radius epsilon
/// (sign-preserving soft threshold).
std::vector<double> project_l1(std::vector<double> v, double epsilon);

/// One tunable coordinate: intercept or a named coefficient of a ChangeTiming
/// model for a non-adversarial (role, has_visible) slot.
struct TuneCoordinate {
  Role role = Role::Regular;
  bool has_visible = false;
  bool is_intercept = false;
  FeatureName feature = FeatureName::OInv;
};

struct TuneConfig {
  double epsilon = 0.0;
  int passes = 1;
  double grid_step = 0.02;
  double candidate_range = 0.5;  // deltas swept over [-range, +range]
  int reps_per_eval = 100;
  bool include_intercepts = true;
  Scenario scenario;  // behavior must hold the starting ModelBank
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct TuneDelta {
  TuneCoordinate coord;
  double value = 0.0;
};

struct TuneResult {
  std::vector<TuneDelta> delta;        // nonzero entries only
  std::vector<double> objective_trace; // baseline followed by accepted rates
  double baseline_rate = 0.0;
  double final_rate = 0.0;
};

/// Consensus rate of the scenario under the candidate bank using common
/// random numbers: the same crn_seed must be passed for every candidate
/// evaluated within one tuning run.
double estimate_rate(const ModelBank& bank, const Scenario& scenario, int reps,
                     std::uint64_t crn_seed, int jobs = 1);

/// The tunable coordinates in sweep order: slot order (Regular before
/// Visible, no-visible before has-visible), intercept first when included,
/// then ChangeTiming features in canonical feature order.
std::vector<TuneCoordinate> tune_coordinates(bool include_intercepts);

/// Coordinate Greedy under the l1 budget. For each coordinate all grid
/// candidates are evaluated with the others fixed; the best strictly
/// improving candidate is projected into the budget and re-evaluated, and
/// kept only if the projected point still strictly improves the objective.
TuneResult coordinate_greedy(const TuneConfig& config);

/// Test seam: same search driven by an arbitrary objective.
TuneResult coordinate_greedy(const TuneConfig& config,
                             const std::function<double(const ModelBank&)>& objective);

/// Applies delta entries on top of a bank.
ModelBank apply_deltas(const ModelBank& bank, const std::vector<TuneDelta>& deltas);

std::string tune_report_json(const TuneConfig& config, const TuneResult& result);

}  // namespace consensim
