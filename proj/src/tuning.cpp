#include "consensim/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "consensim/metrics.hpp"

namespace consensim {

std::vector<double> project_l1(std::vector<double> v, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  double norm = 0.0;
  for (double x : v) norm += std::abs(x);
  if (norm <= epsilon) return v;
  if (epsilon == 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return v;
  }
  // theta solves sum(max(|v_i| - theta, 0)) = epsilon
  std::vector<double> mags(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - epsilon) / static_cast<double>(j + 1);
    if (j + 1 == mags.size() || mags[j + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  for (double& x : v) {
    const double mag = std::abs(x) - theta;
    x = mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
  }
  return v;
}

double estimate_rate(const ModelBank& bank, const Scenario& scenario, int reps,
                     std::uint64_t crn_seed, int jobs) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  Scenario candidate = scenario;
  candidate.behavior = bank;
  auto records = run_batch(candidate, reps, crn_seed, jobs);
  long wins = 0;
  for (const auto& r : records) wins += r.trace.outcome.has_value();
  return static_cast<double>(wins) / reps;
}

std::vector<TuneCoordinate> tune_coordinates(bool include_intercepts) {
  // the four non-adversarial ChangeTiming slots, coordinates in canonical order
  static constexpr FeatureName kChangeFeatures[] = {
      FeatureName::NInv, FeatureName::NVis, FeatureName::OInv,
      FeatureName::OVis, FeatureName::CInv, FeatureName::CVis};
  std::vector<TuneCoordinate> coords;
  for (Role role : {Role::Regular, Role::Visible}) {
    for (bool has_visible : {false, true}) {
      if (include_intercepts)
        coords.push_back({role, has_visible, true, FeatureName::OInv});
      for (FeatureName f : kChangeFeatures)
        coords.push_back({role, has_visible, false, f});
    }
  }
  return coords;
}

ModelBank apply_deltas(const ModelBank& bank, const std::vector<TuneDelta>& deltas) {
  ModelBank out = bank;
  for (const auto& d : deltas) {
    LogisticModel& m =
        out.at(d.coord.role, d.coord.has_visible, DecisionKind::ChangeTiming);
    if (d.coord.is_intercept) m.intercept += d.value;
    else feature_at(m.coefficients, d.coord.feature) += d.value;
  }
  return out;
}

namespace {

ModelBank bank_with_delta(const ModelBank& base,
                          const std::vector<TuneCoordinate>& coords,
                          const std::vector<double>& delta) {
  ModelBank out = base;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (delta[i] == 0.0) continue;
    LogisticModel& m =
        out.at(coords[i].role, coords[i].has_visible, DecisionKind::ChangeTiming);
    if (coords[i].is_intercept) m.intercept += delta[i];
    else feature_at(m.coefficients, coords[i].feature) += delta[i];
  }
  return out;
}

}  // namespace

TuneResult coordinate_greedy(const TuneConfig& config,
                             const std::function<double(const ModelBank&)>& objective) {
  if (config.epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (config.grid_step <= 0.0) throw std::invalid_argument("grid_step must be > 0");
  if (!std::holds_alternative<ModelBank>(config.scenario.behavior))
    throw std::invalid_argument("tuning scenario must carry a model bank");

  const ModelBank& base = std::get<ModelBank>(config.scenario.behavior);
  const auto coords = tune_coordinates(config.include_intercepts);
  std::vector<double> delta(coords.size(), 0.0);

  TuneResult result;
  result.baseline_rate = objective(base);
  result.objective_trace.push_back(result.baseline_rate);
  double incumbent = result.baseline_rate;

  const int half_steps =
      static_cast<int>(std::floor(config.candidate_range / config.grid_step + 1e-9));

  for (int pass = 0; pass < config.passes; ++pass) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (config.epsilon == 0.0) continue;  // empty feasible ball, nothing to try
      // candidate values for this coordinate, others fixed
      double best_rate = incumbent;
      double best_value = delta[i];
      bool improved = false;
      for (int s = -half_steps; s <= half_steps; ++s) {
        const double value = s * config.grid_step;
        if (value == delta[i]) continue;
        std::vector<double> trial = delta;
        trial[i] = value;
        const double rate = objective(bank_with_delta(base, coords, trial));
        const bool better = rate > best_rate;
        const bool tie_smaller =
            improved && rate == best_rate && std::abs(value) < std::abs(best_value);
        if (better || tie_smaller) {
          best_rate = rate;
          best_value = value;
          improved = true;
        }
      }
      if (!improved) continue;
      // project the cumulative modification into the budget and re-evaluate;
      // keep it only if the projected point still beats the incumbent
      std::vector<double> trial = delta;
      trial[i] = best_value;
      std::vector<double> projected = project_l1(trial, config.epsilon);
      const double projected_rate =
          projected == trial ? best_rate
                             : objective(bank_with_delta(base, coords, projected));
      if (projected_rate > incumbent) {
        delta = std::move(projected);
        incumbent = projected_rate;
        result.objective_trace.push_back(incumbent);
      }
    }
  }

  result.final_rate = incumbent;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (delta[i] != 0.0) result.delta.push_back({coords[i], delta[i]});
  return result;
}

TuneResult coordinate_greedy(const TuneConfig& config) {
  return coordinate_greedy(config, [&config](const ModelBank& bank) {
    return estimate_rate(bank, config.scenario, config.reps_per_eval, config.seed,
                         config.jobs);
  });
}

std::string tune_report_json(const TuneConfig& config, const TuneResult& result) {
  nlohmann::ordered_json deltas = nlohmann::ordered_json::array();
  for (const auto& d : result.delta) {
    deltas.push_back({{"role", role_name(d.coord.role)},
                      {"has_visible", d.coord.has_visible},
                      {"term", d.coord.is_intercept ? "intercept"
                                                    : feature_name(d.coord.feature)},
                      {"value", d.value}});
  }
  nlohmann::ordered_json root{{"epsilon", config.epsilon},
                              {"passes", config.passes},
                              {"grid_step", config.grid_step},
                              {"candidate_range", config.candidate_range},
                              {"reps_per_eval", config.reps_per_eval},
                              {"baseline_rate", result.baseline_rate},
                              {"final_rate", result.final_rate},
                              {"delta", deltas},
                              {"objective_trace", result.objective_trace}};
  return root.dump(2) + "\n";
}

}  // namespace consensim
