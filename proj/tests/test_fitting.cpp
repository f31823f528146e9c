#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "consensim/fitting.hpp"

using namespace consensim;

namespace {

GameLogRecord single_node_log(int game_id, const std::vector<Color>& history) {
  GameLogRecord log;
  log.game_id = game_id;
  log.graph = Graph::from_edges(1, {});
  log.roles = RoleAssignment{{Role::Regular}};
  for (Color c : history) log.states.push_back({c});
  return log;
}

// rows with one active feature column, synthesized from a known model
RowSet synth_rows(double intercept, double coef, std::size_t n, Rng& rng,
                  int games = 50) {
  RowSet rows;
  rows.columns = {FeatureName::DInv};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.next_double();
    const double p = 1.0 / (1.0 + std::exp(-(intercept + coef * x)));
    rows.x.push_back(x);
    rows.y.push_back(rng.bernoulli(p) ? 1 : 0);
    rows.game.push_back(static_cast<int>(i % games));
  }
  return rows;
}

}  // namespace

TEST_SUITE("fitting") {

TEST_CASE("decision columns are the model feature sets") {
  CHECK(decision_columns(DecisionKind::InitialTiming) ==
        std::vector<FeatureName>{FeatureName::DInv, FeatureName::DVis,
                                 FeatureName::NInv, FeatureName::NVis});
  CHECK(decision_columns(DecisionKind::InitialColor) ==
        std::vector<FeatureName>{FeatureName::GInv, FeatureName::GVis,
                                 FeatureName::RInv, FeatureName::RVis});
  CHECK(decision_columns(DecisionKind::ChangeTiming).size() == 6);
}

TEST_CASE("hazard rows for a pick at tick 3") {
  auto log = single_node_log(0, {Color::White, Color::White, Color::White,
                                 Color::White, Color::Red, Color::Red});
  RowSet rows = build_rows({log}, Role::Regular, false, DecisionKind::InitialTiming);
  REQUIRE(rows.rows() == 4);  // ticks 0..3
  CHECK(rows.y[0] == 0);
  CHECK(rows.y[1] == 0);
  CHECK(rows.y[2] == 0);
  CHECK(rows.y[3] == 1);

  RowSet picks = build_rows({log}, Role::Regular, false, DecisionKind::InitialColor);
  REQUIRE(picks.rows() == 1);
  CHECK(picks.y[0] == 1);  // red pick

  // a never-picking node emits one timing row per decision tick, none positive
  auto idle = single_node_log(1, std::vector<Color>(11, Color::White));
  RowSet idle_rows = build_rows({idle}, Role::Regular, false, DecisionKind::InitialTiming);
  CHECK(idle_rows.rows() == 10);
  for (auto y : idle_rows.y) CHECK(y == 0);
}

TEST_CASE("green pick labels zero and change rows count flips") {
  auto log = single_node_log(0, {Color::White, Color::Green, Color::Green,
                                 Color::Red, Color::Red});
  RowSet picks = build_rows({log}, Role::Regular, false, DecisionKind::InitialColor);
  REQUIRE(picks.rows() == 1);
  CHECK(picks.y[0] == 0);

  RowSet changes = build_rows({log}, Role::Regular, false, DecisionKind::ChangeTiming);
  REQUIRE(changes.rows() == 3);  // colored at ticks 1,2,3
  CHECK(changes.y[0] == 0);
  CHECK(changes.y[1] == 1);
  CHECK(changes.y[2] == 0);

  // colored-never-flipping span of 10 decision ticks
  auto steady = single_node_log(1, std::vector<Color>(11, Color::Red));
  RowSet steady_rows = build_rows({steady}, Role::Regular, false, DecisionKind::ChangeTiming);
  CHECK(steady_rows.rows() == 10);
  for (auto y : steady_rows.y) CHECK(y == 0);
}

TEST_CASE("timing row count is pick tick plus one") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int length = 8 + static_cast<int>(rng.next_below(10));
    const int pick = static_cast<int>(rng.next_below(length - 1));
    std::vector<Color> history;
    for (int t = 0; t < length; ++t)
      history.push_back(t <= pick ? Color::White : Color::Red);
    auto log = single_node_log(trial, history);
    RowSet rows = build_rows({log}, Role::Regular, false, DecisionKind::InitialTiming);
    REQUIRE(rows.rows() == static_cast<std::size_t>(pick) + 1);
  }
}

TEST_CASE("stratum selection respects role and visible-neighbor flag") {
  GameLogRecord log;
  log.game_id = 0;
  log.graph = Graph::from_edges(3, {{0, 1}, {1, 2}});
  log.roles = RoleAssignment{{Role::Regular, Role::Visible, Role::Regular}};
  log.states = {{Color::White, Color::White, Color::White},
                {Color::Red, Color::Red, Color::Red}};
  // nodes 0 and 2 are regular with a visible neighbor; node 1 is visible without
  CHECK(build_rows({log}, Role::Regular, true, DecisionKind::InitialTiming).rows() == 2);
  CHECK(build_rows({log}, Role::Regular, false, DecisionKind::InitialTiming).rows() == 0);
  CHECK(build_rows({log}, Role::Visible, false, DecisionKind::InitialTiming).rows() == 1);
}

TEST_CASE("fit rejects degenerate inputs") {
  RowSet empty;
  empty.columns = decision_columns(DecisionKind::InitialTiming);
  CHECK_THROWS_AS(fit_l1_logistic(empty, 0.01), std::invalid_argument);

  RowSet ones;
  ones.columns = {FeatureName::DInv};
  ones.x = {0.1, 0.7};
  ones.y = {1, 1};
  ones.game = {0, 1};
  CHECK_THROWS_AS(fit_l1_logistic(ones, 0.01), std::invalid_argument);
}

TEST_CASE("huge lambda zeroes coefficients and leaves the base-rate intercept") {
  Rng rng(11);
  RowSet rows = synth_rows(-0.4, 1.2, 4000, rng);
  LogisticModel m = fit_l1_logistic(rows, 1e6);
  CHECK(feature_at(m.coefficients, FeatureName::DInv) == 0.0);
  double positives = 0;
  for (auto y : rows.y) positives += y;
  const double base = positives / rows.rows();
  CHECK(m.intercept == doctest::Approx(std::log(base / (1 - base))).epsilon(1e-6));
}

TEST_CASE("balanced label-independent data fits a zero intercept") {
  // every feature value appears with both labels equally often
  RowSet rows;
  rows.columns = {FeatureName::DInv};
  for (int i = 0; i < 1000; ++i) {
    rows.x.push_back(i % 2 ? 0.25 : 0.75);
    rows.y.push_back((i / 2) % 2);
    rows.game.push_back(i % 10);
  }
  LogisticModel m = fit_l1_logistic(rows, 1e-3);
  CHECK(std::abs(m.intercept) < 1e-3);
  CHECK(std::abs(feature_at(m.coefficients, FeatureName::DInv)) < 1e-6);
}

TEST_CASE("synthetic recovery of a known model") {
  Rng rng(21);
  RowSet rows = synth_rows(-2.0, 1.5, 50000, rng);
  FitDiagnostics diag;
  LogisticModel m = fit_l1_logistic(rows, 1e-5, {}, &diag);
  CHECK(diag.converged);
  CHECK(std::abs(m.intercept - (-2.0)) < 0.1);
  CHECK(std::abs(feature_at(m.coefficients, FeatureName::DInv) - 1.5) < 0.1);
}

TEST_CASE("objective decreases monotonically and satisfies the kkt condition") {
  Rng rng(31);
  RowSet rows = synth_rows(-1.0, 0.8, 6000, rng);
  const double lambda = 2e-3;
  FitDiagnostics diag;
  LogisticModel m = fit_l1_logistic(rows, lambda, {}, &diag);
  REQUIRE(diag.objective_history.size() >= 2);
  for (std::size_t i = 10; i < diag.objective_history.size(); i += 10)
    REQUIRE(diag.objective_history[i] <= diag.objective_history[i - 10] + 1e-12);
  CHECK(kkt_residual(m, rows, lambda) <= lambda + 1e-6);
}

TEST_CASE("cross_validate trivial grids") {
  Rng rng(41);
  RowSet rows = synth_rows(-1.0, 1.0, 500, rng, 20);
  FitConfig fc;
  fc.lambda_grid = {0.01};
  fc.folds = 4;
  Rng cv_rng(1);
  CHECK(cross_validate(rows, fc, cv_rng).lambda == 0.01);

  fc.lambda_grid = {0.01, 0.01, 0.01};  // duplicates collapse to the trivial case
  Rng cv_rng2(1);
  auto r = cross_validate(rows, fc, cv_rng2);
  CHECK(r.lambda == 0.01);
  CHECK(r.losses.size() == 1);
}

TEST_CASE("cross_validate needs enough games") {
  Rng rng(43);
  RowSet rows = synth_rows(-1.0, 1.0, 100, rng, 3);
  FitConfig fc;
  fc.lambda_grid = {0.01, 0.1};
  fc.folds = 5;
  Rng cv_rng(1);
  CHECK_THROWS_AS(cross_validate(rows, fc, cv_rng), std::invalid_argument);
}

TEST_CASE("cross_validate zeroes an inert feature on sparse truth") {
  // y depends on column 0 only; column 1 is noise; the chosen lambda should
  // produce a fit whose inert coefficient is exactly zero in most runs
  int zeroed = 0;
  for (int run = 0; run < 10; ++run) {
    Rng rng(1000 + run);
    RowSet rows;
    rows.columns = {FeatureName::DInv, FeatureName::DVis};
    const int n = 1500;
    for (int i = 0; i < n; ++i) {
      const double x0 = rng.next_double();
      const double x1 = rng.next_double();
      const double p = 1.0 / (1.0 + std::exp(-(-1.0 + 2.0 * x0)));
      rows.x.push_back(x0);
      rows.x.push_back(x1);
      rows.y.push_back(rng.bernoulli(p) ? 1 : 0);
      rows.game.push_back(i % 30);
    }
    FitConfig fc;
    fc.lambda_grid = {5e-3, 2e-2, 8e-2};
    fc.folds = 3;
    Rng cv_rng(run);
    auto cv = cross_validate(rows, fc, cv_rng);
    LogisticModel m = fit_l1_logistic(rows, cv.lambda, fc.options);
    if (feature_at(m.coefficients, FeatureName::DVis) == 0.0 &&
        feature_at(m.coefficients, FeatureName::DInv) > 0.5)
      ++zeroed;
  }
  CHECK(zeroed >= 8);
}

TEST_CASE("closed loop on a coefficient-free bank refits near-zero coefficients") {
  // intercept-only generator: refit coefficients should vanish
  ModelBank flat;
  for (Role role : {Role::Regular, Role::Visible, Role::Adversarial}) {
    for (bool hv : {false, true}) {
      flat.at(role, hv, DecisionKind::InitialTiming).intercept = -1.5;
      flat.at(role, hv, DecisionKind::InitialColor).intercept = 0.0;
      flat.at(role, hv, DecisionKind::ChangeTiming).intercept = -2.5;
    }
  }
  Scenario sc;
  sc.topology = er_dense_spec(12);
  sc.role_spec = {0, 0, Placement::Random, Placement::Random};
  sc.behavior = flat;
  sc.ticks = 40;
  auto records = run_batch(sc, 800, 77, 2);
  std::vector<GameLogRecord> logs;
  for (std::size_t i = 0; i < records.size(); ++i)
    logs.push_back({static_cast<int>(i), records[i].seed, records[i].graph,
                    records[i].roles, records[i].trace.states,
                    records[i].trace.outcome});

  // the sparsity penalty has to dominate sampling noise for exact zeros;
  // near-constant count features are collinear with the intercept otherwise
  FitConfig fc;
  fc.lambda_grid = {3e-3};
  Rng rng(7);
  RefitResult r = refit_bank(logs, fc, rng);
  for (DecisionKind kind : {DecisionKind::InitialTiming, DecisionKind::InitialColor,
                            DecisionKind::ChangeTiming}) {
    const int idx = ModelBank::index(Role::Regular, false, kind);
    REQUIRE_FALSE(r.slots[idx].placeholder);
    const LogisticModel& m = r.bank.at(Role::Regular, false, kind);
    for (FeatureName f : decision_columns(kind))
      REQUIRE(std::abs(feature_at(m.coefficients, f)) < 0.05);
    CHECK(std::abs(m.intercept - flat.at(Role::Regular, false, kind).intercept) < 0.15);
  }
}

TEST_CASE("refit_bank flags empty strata with base-rate placeholders") {
  // logs with regular nodes only: visible and adversarial strata are empty
  auto log = single_node_log(0, {Color::White, Color::White, Color::Red,
                                 Color::Red, Color::Green});
  auto log2 = single_node_log(1, {Color::White, Color::Red, Color::Red,
                                  Color::Red, Color::Red});
  FitConfig fc;
  fc.lambda_grid = {1e-3};
  Rng rng(3);
  RefitResult r = refit_bank({log, log2}, fc, rng);

  const int reg_idx = ModelBank::index(Role::Regular, false, DecisionKind::InitialTiming);
  CHECK_FALSE(r.slots[reg_idx].placeholder);
  const int adv_idx = ModelBank::index(Role::Adversarial, false, DecisionKind::InitialTiming);
  CHECK(r.slots[adv_idx].placeholder);
  CHECK(r.slots[adv_idx].row_count == 0);
  const int vis_idx = ModelBank::index(Role::Visible, true, DecisionKind::ChangeTiming);
  CHECK(r.slots[vis_idx].placeholder);
}

}  // TEST_SUITE
