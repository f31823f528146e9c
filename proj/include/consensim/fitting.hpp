#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "consensim/behavior.hpp"
#include "consensim/engine.hpp"
#include "consensim/rng.hpp"

namespace consensim {

/// One logged game: everything needed to rebuild decision rows.
struct GameLogRecord {
  int game_id = 0;
  std::uint64_t seed = 0;
  Graph graph;
  RoleAssignment roles;
  std::vector<std::vector<Color>> states;
  std::optional<ConsensusOutcome> outcome;
};

/// Dense training rows for one (role, has-visible, decision) stratum.
/// Columns are the decision kind's feature set in canonical order.
struct RowSet {
  std::vector<FeatureName> columns;
  std::vector<double> x;        // row-major, rows() * columns.size()
  std::vector<unsigned char> y;
  std::vector<std::int32_t> game;  // game id per row, for fold splits

  std::size_t rows() const { return y.size(); }
  const double* row(std::size_t i) const { return x.data() + i * columns.size(); }
};

/// The feature columns a decision kind's models use.
std::vector<FeatureName> decision_columns(DecisionKind kind);

/// Hazard-row construction. InitialTiming: one row per (node, tick) while the
/// node is White, label 1 at the pick tick. InitialColor: one row per pick,
/// label 1 = Red. ChangeTiming: one row per (node, tick) while colored, label
/// 1 at flip ticks. Features come from the tick-t state the decision read.
RowSet build_rows(const std::vector<GameLogRecord>& logs, Role role,
                  bool has_visible, DecisionKind kind);

struct FitOptions {
  int max_iters = 50000;
  double tolerance = 1e-7;  // KKT residual target
};

struct FitDiagnostics {
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  std::vector<double> objective_history;  // one entry per iteration
};

/// Minimizes mean logistic loss + lambda * ||coefficients||_1 (intercept
/// unpenalized) by monotone proximal-gradient iteration with backtracking.
/// Rejects empty or single-class input.
LogisticModel fit_l1_logistic(const RowSet& rows, double lambda,
                              const FitOptions& options = {},
                              FitDiagnostics* diagnostics = nullptr);

/// Mean logistic loss of a model on rows (no penalty).
double logistic_loss(const LogisticModel& model, const RowSet& rows);

/// Max KKT violation of the l1-penalized objective at the model.
double kkt_residual(const LogisticModel& model, const RowSet& rows, double lambda);

struct FitConfig {
  std::vector<double> lambda_grid{1e-4};
  int folds = 5;
  FitOptions options;
};

struct CrossValResult {
  double lambda = 0.0;
  std::vector<std::pair<double, double>> losses;  // (lambda, mean held-out loss)
};

/// K-fold by game id; smallest mean held-out loss wins, ties take the larger
/// (sparser) lambda. Duplicate grid entries are collapsed.
CrossValResult cross_validate(const RowSet& rows, const FitConfig& config, Rng& rng);

struct SlotFit {
  bool placeholder = false;  // stratum empty or single-class
  std::size_t row_count = 0;
  std::size_t positives = 0;
  double lambda = 0.0;
  double kkt = 0.0;
  bool converged = false;
};

struct RefitResult {
  ModelBank bank;
  std::array<SlotFit, ModelBank::kSlots> slots{};
};

/// Refits all 18 models from logs. Strata with no usable rows get a flagged
/// intercept-only base-rate placeholder. Cross-validation runs only when the
/// lambda grid offers a real choice.
RefitResult refit_bank(const std::vector<GameLogRecord>& logs,
                       const FitConfig& config, Rng& rng);

}  // namespace consensim
