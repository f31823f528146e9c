#include "consensim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace consensim {

std::vector<FeatureName> decision_columns(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::InitialTiming:
      return {FeatureName::DInv, FeatureName::DVis, FeatureName::NInv,
              FeatureName::NVis};
    case DecisionKind::InitialColor:
      return {FeatureName::GInv, FeatureName::GVis, FeatureName::RInv,
              FeatureName::RVis};
    case DecisionKind::ChangeTiming:
      return {FeatureName::NInv, FeatureName::NVis, FeatureName::OInv,
              FeatureName::OVis, FeatureName::CInv, FeatureName::CVis};
  }
  throw std::invalid_argument("unknown decision kind");
}

RowSet build_rows(const std::vector<GameLogRecord>& logs, Role role,
                  bool has_visible, DecisionKind kind) {
  RowSet rows;
  rows.columns = decision_columns(kind);
  const std::size_t d = rows.columns.size();

  for (const auto& log : logs) {
    const int n = log.graph.node_count();
    if (log.roles.size() != n)
      throw std::invalid_argument("log roles/graph size mismatch");
    std::vector<char> node_has_vis(n, 0);
    for (int v = 0; v < n; ++v)
      for (int u : log.graph.neighbors(v))
        if (log.roles[u] == Role::Visible) {
          node_has_vis[v] = 1;
          break;
        }

    auto emit = [&](const std::vector<Color>& state, int node, Color own, bool label) {
      Features f = extract_features(state, log.graph, log.roles, node, kind, own);
      for (std::size_t c = 0; c < d; ++c)
        rows.x.push_back(feature_at(f, rows.columns[c]));
      rows.y.push_back(label ? 1 : 0);
      rows.game.push_back(log.game_id);
    };

    for (int v = 0; v < n; ++v) {
      if (log.roles[v] != role || static_cast<bool>(node_has_vis[v]) != has_visible)
        continue;
      for (std::size_t t = 0; t + 1 < log.states.size(); ++t) {
        const Color cur = log.states[t][v];
        const Color nxt = log.states[t + 1][v];
        switch (kind) {
          case DecisionKind::InitialTiming:
            if (cur == Color::White) emit(log.states[t], v, cur, nxt != Color::White);
            break;
          case DecisionKind::InitialColor:
            if (cur == Color::White && nxt != Color::White)
              emit(log.states[t], v, cur, nxt == Color::Red);
            break;
          case DecisionKind::ChangeTiming:
            if (cur != Color::White) emit(log.states[t], v, cur, nxt != cur);
            break;
        }
      }
    }
  }
  return rows;
}

namespace {

struct Objective {
  const RowSet& rows;
  double lambda;

  // mean logistic loss and its gradient at (intercept, w)
  double loss_and_gradient(double intercept, const std::vector<double>& w,
                           double& g0, std::vector<double>& g) const {
    const std::size_t d = rows.columns.size();
    const std::size_t m = rows.rows();
    g0 = 0.0;
    std::fill(g.begin(), g.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* xi = rows.row(i);
      double s = intercept;
      for (std::size_t j = 0; j < d; ++j) s += w[j] * xi[j];
      const double y = rows.y[i];
      // log(1 + e^s) - y*s, computed stably
      loss += std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))) - y * s;
      const double r = 1.0 / (1.0 + std::exp(-s)) - y;
      g0 += r;
      for (std::size_t j = 0; j < d; ++j) g[j] += r * xi[j];
    }
    const double inv = 1.0 / static_cast<double>(m);
    loss *= inv;
    g0 *= inv;
    for (double& v : g) v *= inv;
    return loss;
  }

  double loss_only(double intercept, const std::vector<double>& w) const {
    const std::size_t d = rows.columns.size();
    const std::size_t m = rows.rows();
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* xi = rows.row(i);
      double s = intercept;
      for (std::size_t j = 0; j < d; ++j) s += w[j] * xi[j];
      loss += std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))) - rows.y[i] * s;
    }
    return loss / static_cast<double>(m);
  }

  double penalty(const std::vector<double>& w) const {
    double p = 0.0;
    for (double v : w) p += std::abs(v);
    return lambda * p;
  }
};

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double kkt_from_gradient(double g0, const std::vector<double>& g,
                         const std::vector<double>& w, double lambda) {
  double r = std::abs(g0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (w[j] == 0.0)
      r = std::max(r, std::max(std::abs(g[j]) - lambda, 0.0));
    else
      r = std::max(r, std::abs(g[j] + (w[j] > 0.0 ? lambda : -lambda)));
  }
  return r;
}

}  // namespace

double logistic_loss(const LogisticModel& model, const RowSet& rows) {
  const std::size_t d = rows.columns.size();
  std::vector<double> w(d);
  for (std::size_t j = 0; j < d; ++j)
    w[j] = feature_at(model.coefficients, rows.columns[j]);
  Objective obj{rows, 0.0};
  return obj.loss_only(model.intercept, w);
}

double kkt_residual(const LogisticModel& model, const RowSet& rows, double lambda) {
  const std::size_t d = rows.columns.size();
  std::vector<double> w(d), g(d);
  for (std::size_t j = 0; j < d; ++j)
    w[j] = feature_at(model.coefficients, rows.columns[j]);
  Objective obj{rows, lambda};
  double g0 = 0.0;
  obj.loss_and_gradient(model.intercept, w, g0, g);
  return kkt_from_gradient(g0, g, w, lambda);
}

LogisticModel fit_l1_logistic(const RowSet& rows, double lambda,
                              const FitOptions& options,
                              FitDiagnostics* diagnostics) {
  if (rows.rows() == 0) throw std::invalid_argument("fit on empty row set");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  {
    bool has0 = false, has1 = false;
    for (unsigned char y : rows.y) (y ? has1 : has0) = true;
    if (!has0 || !has1)
      throw std::invalid_argument("fit needs both labels present");
  }

  const std::size_t d = rows.columns.size();
  Objective obj{rows, lambda};

  std::vector<double> w(d, 0.0), g(d, 0.0), w_new(d, 0.0);
  std::vector<double> w_prev(d, 0.0), g_prev(d, 0.0);
  double intercept = 0.0, g0 = 0.0;
  double smooth = obj.loss_and_gradient(intercept, w, g0, g);
  // logistic curvature is bounded by 1/4 per unit feature scale
  double step = 4.0;
  double objective = smooth + obj.penalty(w);

  int iter = 0;
  double kkt = kkt_from_gradient(g0, g, w, lambda);
  for (; iter < options.max_iters && kkt > options.tolerance; ++iter) {
    w_prev = w;
    g_prev = g;
    const double intercept_prev = intercept, g0_prev = g0;

    // backtracking proximal step; monotone in the composite objective
    double smooth_new = 0.0, intercept_new = 0.0;
    for (;;) {
      intercept_new = intercept - step * g0;
      double quad = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        w_new[j] = soft_threshold(w[j] - step * g[j], step * lambda);
        const double dj = w_new[j] - w[j];
        quad += dj * (g[j] + dj / (2.0 * step));
      }
      const double di = intercept_new - intercept;
      quad += di * (g0 + di / (2.0 * step));
      smooth_new = obj.loss_only(intercept_new, w_new);
      if (smooth_new <= smooth + quad + 1e-15 || step < 1e-12) break;
      step *= 0.5;
    }
    w.swap(w_new);
    intercept = intercept_new;
    smooth = obj.loss_and_gradient(intercept, w, g0, g);
    objective = smooth + obj.penalty(w);
    kkt = kkt_from_gradient(g0, g, w, lambda);
    if (diagnostics) diagnostics->objective_history.push_back(objective);

    // spectral (Barzilai-Borwein) step for the next iteration
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double dw = w[j] - w_prev[j];
      num += dw * dw;
      den += dw * (g[j] - g_prev[j]);
    }
    const double di = intercept - intercept_prev;
    num += di * di;
    den += di * (g0 - g0_prev);
    step = den > 1e-300 ? std::clamp(num / den, 1e-8, 1e8) : step * 2.0;
  }

  LogisticModel model;
  model.intercept = intercept;
  for (std::size_t j = 0; j < d; ++j)
    feature_at(model.coefficients, rows.columns[j]) = w[j];
  if (diagnostics) {
    diagnostics->iterations = iter;
    diagnostics->kkt_residual = kkt;
    diagnostics->converged = kkt <= options.tolerance;
  }
  return model;
}

namespace {

RowSet subset_rows(const RowSet& rows, const std::vector<char>& keep) {
  RowSet out;
  out.columns = rows.columns;
  const std::size_t d = rows.columns.size();
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    if (!keep[i]) continue;
    const double* xi = rows.row(i);
    out.x.insert(out.x.end(), xi, xi + d);
    out.y.push_back(rows.y[i]);
    out.game.push_back(rows.game[i]);
  }
  return out;
}

}  // namespace

CrossValResult cross_validate(const RowSet& rows, const FitConfig& config, Rng& rng) {
  if (config.lambda_grid.empty()) throw std::invalid_argument("empty lambda grid");
  std::vector<double> grid = config.lambda_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  CrossValResult result;
  if (grid.size() == 1) {
    result.lambda = grid[0];
    result.losses.push_back({grid[0], std::numeric_limits<double>::quiet_NaN()});
    return result;
  }

  std::vector<std::int32_t> games(rows.game.begin(), rows.game.end());
  std::sort(games.begin(), games.end());
  games.erase(std::unique(games.begin(), games.end()), games.end());
  if (static_cast<int>(games.size()) < config.folds)
    throw std::invalid_argument("fewer distinct games than folds");

  // shuffle game ids, deal them round-robin into folds
  for (std::size_t i = games.size(); i > 1; --i) {
    std::size_t j = rng.next_below(static_cast<std::uint32_t>(i));
    std::swap(games[i - 1], games[j]);
  }
  std::unordered_map<std::int32_t, int> fold_of;
  fold_of.reserve(games.size());
  for (std::size_t i = 0; i < games.size(); ++i)
    fold_of[games[i]] = static_cast<int>(i % config.folds);
  std::vector<int> row_fold(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) row_fold[i] = fold_of.at(rows.game[i]);

  double best_loss = std::numeric_limits<double>::infinity();
  double best_lambda = grid.back();
  for (double lambda : grid) {
    double total_loss = 0.0;
    int used_folds = 0;
    for (int fold = 0; fold < config.folds; ++fold) {
      std::vector<char> train(rows.rows()), test(rows.rows());
      for (std::size_t i = 0; i < rows.rows(); ++i) {
        train[i] = row_fold[i] != fold;
        test[i] = row_fold[i] == fold;
      }
      RowSet train_rows = subset_rows(rows, train);
      RowSet test_rows = subset_rows(rows, test);
      if (test_rows.rows() == 0) continue;
      LogisticModel model = fit_l1_logistic(train_rows, lambda, config.options);
      total_loss += logistic_loss(model, test_rows);
      ++used_folds;
    }
    const double mean_loss = total_loss / std::max(1, used_folds);
    result.losses.push_back({lambda, mean_loss});
    if (mean_loss < best_loss ||
        (mean_loss == best_loss && lambda > best_lambda)) {
      best_loss = mean_loss;
      best_lambda = lambda;
    }
  }
  result.lambda = best_lambda;
  return result;
}

RefitResult refit_bank(const std::vector<GameLogRecord>& logs,
                       const FitConfig& config, Rng& rng) {
  RefitResult result;
  for (Role role : {Role::Regular, Role::Visible, Role::Adversarial}) {
    for (bool has_visible : {false, true}) {
      for (DecisionKind kind :
           {DecisionKind::InitialTiming, DecisionKind::InitialColor,
            DecisionKind::ChangeTiming}) {
        const int idx = ModelBank::index(role, has_visible, kind);
        RowSet rows = build_rows(logs, role, has_visible, kind);
        SlotFit& slot = result.slots[idx];
        slot.row_count = rows.rows();
        slot.positives = std::accumulate(rows.y.begin(), rows.y.end(), std::size_t{0});

        const bool single_class =
            slot.positives == 0 || slot.positives == slot.row_count;
        if (rows.rows() == 0 || single_class) {
          // flagged intercept-only base-rate placeholder
          slot.placeholder = true;
          const double m = static_cast<double>(rows.rows());
          const double p = (static_cast<double>(slot.positives) + 1.0) / (m + 2.0);
          LogisticModel placeholder;
          placeholder.intercept = std::log(p / (1.0 - p));
          result.bank.at(role, has_visible, kind) = placeholder;
          continue;
        }

        CrossValResult cv = cross_validate(rows, config, rng);
        slot.lambda = cv.lambda;
        FitDiagnostics diag;
        result.bank.at(role, has_visible, kind) =
            fit_l1_logistic(rows, cv.lambda, config.options, &diag);
        slot.kkt = diag.kkt_residual;
        slot.converged = diag.converged;
      }
    }
  }
  return result;
}

}  // namespace consensim
