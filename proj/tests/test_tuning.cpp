#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "consensim/tuning.hpp"

using namespace consensim;

namespace {

double l1_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

// Independent projection oracle: bisection on the threshold theta with
// sum(max(|v_i| - theta, 0)) = epsilon.
std::vector<double> project_l1_bisect(const std::vector<double>& v, double epsilon) {
  if (l1_norm(v) <= epsilon) return v;
  double lo = 0.0, hi = 0.0;
  for (double x : v) hi = std::max(hi, std::abs(x));
  for (int iter = 0; iter < 200; ++iter) {
    double theta = 0.5 * (lo + hi);
    double s = 0.0;
    for (double x : v) s += std::max(std::abs(x) - theta, 0.0);
    (s > epsilon ? lo : hi) = theta;
  }
  double theta = 0.5 * (lo + hi);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double mag = std::max(std::abs(v[i]) - theta, 0.0);
    out[i] = v[i] >= 0 ? mag : -mag;
  }
  return out;
}

TuneConfig synthetic_config(double epsilon, int passes) {
  TuneConfig tc;
  tc.epsilon = epsilon;
  tc.passes = passes;
  tc.grid_step = 0.02;
  tc.candidate_range = 0.5;
  tc.reps_per_eval = 1;
  tc.include_intercepts = false;
  Scenario sc;
  sc.topology = Graph::from_edges(2, {{0, 1}});
  sc.fixed_roles = RoleAssignment{{Role::Regular, Role::Regular}};
  sc.behavior = default_model_bank();
  tc.scenario = sc;
  return tc;
}

}  // namespace

TEST_SUITE("tuning") {

TEST_CASE("project_l1 axis cases") {
  CHECK(project_l1({0.3, -0.2}, 1.0) == std::vector<double>{0.3, -0.2});
  CHECK(project_l1({2.0, 0.0}, 1.0) == std::vector<double>{1.0, 0.0});
  auto p = project_l1({0.8, 0.8}, 1.0);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));  // theta = 0.3
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(project_l1({0.4, -0.7}, 0.0) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("project_l1 matches the bisection oracle on random vectors") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(5);
    for (double& x : v) x = (rng.next_double() - 0.5) * 4.0;
    const double epsilon = rng.next_double() * 3.0;
    auto fast = project_l1(v, epsilon);
    auto slow = project_l1_bisect(v, epsilon);
    for (int i = 0; i < 5; ++i) REQUIRE(std::abs(fast[i] - slow[i]) <= 1e-9);
  }
}

TEST_CASE("project_l1 is idempotent and shrinks into the ball") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(6);
    for (double& x : v) x = (rng.next_double() - 0.5) * 2.0;
    const double epsilon = rng.next_double();
    auto p = project_l1(v, epsilon);
    REQUIRE(l1_norm(p) <= epsilon + 1e-9);
    auto pp = project_l1(p, epsilon);
    for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(pp[i] == doctest::Approx(p[i]).epsilon(1e-12));
  }
}

TEST_CASE("tune coordinates cover the four change models in fixed order") {
  auto with = tune_coordinates(true);
  auto without = tune_coordinates(false);
  CHECK(with.size() == 4 * 7);
  CHECK(without.size() == 4 * 6);
  CHECK(with[0].is_intercept);
  CHECK(with[0].role == Role::Regular);
  CHECK_FALSE(with[0].has_visible);
  for (const auto& c : with) CHECK(c.role != Role::Adversarial);
}

TEST_CASE("epsilon zero and zero passes change nothing") {
  int calls = 0;
  auto counting = [&](const ModelBank&) {
    ++calls;
    return 0.5;
  };
  TuneConfig tc = synthetic_config(0.0, 3);
  TuneResult r = coordinate_greedy(tc, counting);
  CHECK(r.delta.empty());
  CHECK(r.final_rate == 0.5);
  CHECK(r.objective_trace == std::vector<double>{0.5});
  CHECK(calls == 1);  // baseline only; the empty ball skips all candidates

  TuneConfig none = synthetic_config(0.4, 0);
  TuneResult r0 = coordinate_greedy(none, counting);
  CHECK(r0.delta.empty());
  CHECK(r0.final_rate == 0.5);
}

TEST_CASE("single-coordinate synthetic objective finds the grid optimum") {
  // objective peaked at delta = +0.1 on the first swept coordinate, flat in
  // the rest; exhaustive grid argmax is the oracle
  const ModelBank base = default_model_bank();
  const double original =
      base.at(Role::Regular, false, DecisionKind::ChangeTiming).intercept;
  auto objective = [&](const ModelBank& bank) {
    const double delta =
        bank.at(Role::Regular, false, DecisionKind::ChangeTiming).intercept - original;
    return 1.0 - (delta - 0.1) * (delta - 0.1);
  };

  double best_rate = -1.0, best_delta = 0.0;
  for (int s = -25; s <= 25; ++s) {
    const double d = s * 0.02;
    const double rate = 1.0 - (d - 0.1) * (d - 0.1);
    if (rate > best_rate) {
      best_rate = rate;
      best_delta = d;
    }
  }
  REQUIRE(best_delta == doctest::Approx(0.1));

  TuneConfig tc = synthetic_config(1.0, 1);
  tc.include_intercepts = true;
  TuneResult r = coordinate_greedy(tc, objective);
  REQUIRE(r.delta.size() == 1);
  CHECK(r.delta[0].coord.is_intercept);
  CHECK(r.delta[0].value == doctest::Approx(0.1));
  CHECK(r.final_rate == doctest::Approx(best_rate));
}

TEST_CASE("ties prefer the smaller modification") {
  // flat objective improved identically by any nonzero delta on one coordinate
  const ModelBank base = default_model_bank();
  const double original =
      base.at(Role::Regular, false, DecisionKind::ChangeTiming).intercept;
  auto objective = [&](const ModelBank& bank) {
    const double delta =
        bank.at(Role::Regular, false, DecisionKind::ChangeTiming).intercept - original;
    return delta == 0.0 ? 0.0 : 1.0;
  };
  TuneConfig tc = synthetic_config(1.0, 1);
  tc.include_intercepts = true;
  TuneResult r = coordinate_greedy(tc, objective);
  REQUIRE(r.delta.size() == 1);
  CHECK(std::abs(r.delta[0].value) == doctest::Approx(0.02));
}

TEST_CASE("delta stays inside the budget and the trace never decreases") {
  // adversarial objective that rewards large moves on every coordinate
  auto pull = [](const ModelBank& bank) {
    const ModelBank base = default_model_bank();
    double s = 0.0;
    for (Role role : {Role::Regular, Role::Visible}) {
      for (bool hv : {false, true}) {
        const auto& m = bank.at(role, hv, DecisionKind::ChangeTiming);
        const auto& b = base.at(role, hv, DecisionKind::ChangeTiming);
        s += std::abs(m.intercept - b.intercept);
        for (int i = 0; i < kFeatureCount; ++i)
          s += std::abs(m.coefficients[i] - b.coefficients[i]);
      }
    }
    return s;
  };
  TuneConfig tc = synthetic_config(0.3, 2);
  TuneResult r = coordinate_greedy(tc, pull);

  double norm = 0.0;
  for (const auto& d : r.delta) norm += std::abs(d.value);
  CHECK(norm <= 0.3 + 1e-9);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
    REQUIRE(r.objective_trace[i] >= r.objective_trace[i - 1]);
}

TEST_CASE("estimate_rate on a forced-consensus toy scenario is one") {
  // everyone picks immediately, always red, never flips
  ModelBank bank;
  for (Role role : {Role::Regular, Role::Visible, Role::Adversarial}) {
    for (bool hv : {false, true}) {
      bank.at(role, hv, DecisionKind::InitialTiming).intercept = 1e9;
      bank.at(role, hv, DecisionKind::InitialColor).intercept = 1e9;
      bank.at(role, hv, DecisionKind::ChangeTiming).intercept = -1e9;
    }
  }
  Scenario sc;
  sc.topology = Graph::from_edges(3, {{0, 1}, {1, 2}});
  sc.fixed_roles = RoleAssignment{{Role::Regular, Role::Regular, Role::Regular}};
  sc.behavior = bank;
  CHECK(estimate_rate(bank, sc, 1, 5) == 1.0);
  CHECK(estimate_rate(bank, sc, 16, 5) == 1.0);
}

TEST_CASE("estimate_rate reuses common random numbers") {
  Scenario sc;
  sc.topology = er_dense_spec(20);
  sc.role_spec = {0, 0, Placement::Random, Placement::Random};
  sc.behavior = default_model_bank();
  const double a = estimate_rate(default_model_bank(), sc, 64, 555, 2);
  const double b = estimate_rate(default_model_bank(), sc, 64, 555, 1);
  CHECK(a == b);
}

TEST_CASE("real tuning run on a tiny scenario keeps its invariants") {
  TuneConfig tc;
  tc.epsilon = 0.2;
  tc.passes = 1;
  tc.grid_step = 0.1;  // coarse grid keeps the run fast
  tc.candidate_range = 0.2;
  tc.reps_per_eval = 40;
  tc.include_intercepts = false;
  tc.seed = 77;
  tc.jobs = 2;
  Scenario sc;
  sc.topology = er_sparse_spec(12);
  sc.role_spec = {0, 0, Placement::Random, Placement::Random};
  sc.behavior = default_model_bank();
  sc.ticks = 30;
  tc.scenario = sc;

  TuneResult r = coordinate_greedy(tc);
  double norm = 0.0;
  for (const auto& d : r.delta) norm += std::abs(d.value);
  CHECK(norm <= tc.epsilon + 1e-9);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
    REQUIRE(r.objective_trace[i] >= r.objective_trace[i - 1]);
  CHECK(r.final_rate >= r.baseline_rate);
  CHECK(r.objective_trace.front() == r.baseline_rate);
  CHECK(r.objective_trace.back() == r.final_rate);
}

}  // TEST_SUITE
