#include "consensim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace consensim {

std::optional<Color> check_consensus(const std::vector<Color>& colors,
                                     const RoleAssignment& roles) {
  Color shared = Color::White;
  bool any_team = false;
  for (std::size_t v = 0; v < colors.size(); ++v) {
    if (roles[static_cast<int>(v)] == Role::Adversarial) continue;
    if (colors[v] == Color::White) return std::nullopt;
    if (!any_team) {
      shared = colors[v];
      any_team = true;
    } else if (colors[v] != shared) {
      return std::nullopt;
    }
  }
  if (!any_team) return std::nullopt;
  return shared;
}

double baseline_seed_hazard() {
  // sigmoid of the no-signal initial-pick intercept of the timing models
  return 1.0 / (1.0 + std::exp(1.952));
}

namespace {

void validate(const GameConfig& config) {
  if (config.ticks < 1) throw std::invalid_argument("ticks must be >= 1");
  const int n = config.graph.node_count();
  if (config.roles.size() != n) throw std::invalid_argument("roles/graph size mismatch");
  if (config.initial_colors &&
      static_cast<int>(config.initial_colors->size()) != n)
    throw std::invalid_argument("initial_colors/graph size mismatch");
  if (std::holds_alternative<BaselineBehavior>(config.behavior)) {
    if (config.roles.count(Role::Adversarial) != 0)
      throw std::invalid_argument("baseline behavior requires zero adversaries");
    if (std::get<BaselineBehavior>(config.behavior).delay < 0)
      throw std::invalid_argument("delay must be >= 0");
  }
}

bool node_has_visible_neighbor(const GameConfig& config, int node) {
  for (int u : config.graph.neighbors(node))
    if (config.roles[u] == Role::Visible) return true;
  return false;
}

}  // namespace

GameState step(const GameState& state, const GameConfig& config, Rng& rng) {
  const int n = config.graph.node_count();
  GameState next;
  next.tick = state.tick + 1;
  next.colors = state.colors;

  const bool learned = std::holds_alternative<ModelBank>(config.behavior);
  const ModelBank* bank = learned ? &std::get<ModelBank>(config.behavior) : nullptr;
  const int delay = learned ? 0 : std::get<BaselineBehavior>(config.behavior).delay;

  for (int v = 0; v < n; ++v) {
    // fixed two draws per node per tick, used or not
    const double d1 = rng.next_double();
    const double d2 = rng.next_double();
    const Color own = state.colors[v];
    const Role role = config.roles[v];

    if (learned) {
      const bool has_vis = node_has_visible_neighbor(config, v);
      if (own == Color::White) {
        Features f = extract_features(state.colors, config.graph, config.roles, v,
                                      DecisionKind::InitialTiming, own);
        const double p_pick =
            logistic_prob(bank->at(role, has_vis, DecisionKind::InitialTiming), f);
        if (d1 < p_pick) {
          const double p_red =
              logistic_prob(bank->at(role, has_vis, DecisionKind::InitialColor), f);
          next.colors[v] = d2 < p_red ? Color::Red : Color::Green;
        }
      } else {
        Features f = extract_features(state.colors, config.graph, config.roles, v,
                                      DecisionKind::ChangeTiming, own);
        const double p_flip =
            logistic_prob(bank->at(role, has_vis, DecisionKind::ChangeTiming), f);
        if (d1 < p_flip) next.colors[v] = opposite(own);
      }
    } else {
      if (!baseline_gate(v, config.roles, config.graph, state.tick, delay)) continue;
      Color decision;
      if (own == Color::White) {
        // follow-the-leader settles the initial pick; majority thereafter
        auto lead = decide_follow_leader(state.colors, config.graph, config.roles, v);
        decision = lead ? *lead : decide_majority(state.colors, config.graph, v, own);
        if (decision == Color::White) {
          // no colored signal anywhere in view: seed at the base hazard
          if (d1 < baseline_seed_hazard())
            decision = d2 < 0.5 ? Color::Red : Color::Green;
        }
      } else {
        decision = decide_majority(state.colors, config.graph, v, own);
      }
      if (decision != Color::White) next.colors[v] = decision;
    }
  }
  return next;
}

GameTrace run_game(const GameConfig& config) {
  validate(config);
  Rng rng(config.seed);
  const int n = config.graph.node_count();

  GameState state;
  state.tick = 0;
  if (config.initial_colors) state.colors = *config.initial_colors;
  else state.colors.assign(n, Color::White);

  GameTrace trace;
  trace.states.push_back(state.colors);
  if (auto c = check_consensus(state.colors, config.roles)) {
    trace.outcome = ConsensusOutcome{0, *c};
    return trace;
  }
  for (int t = 0; t < config.ticks; ++t) {
    state = step(state, config, rng);
    trace.states.push_back(state.colors);
    if (auto c = check_consensus(state.colors, config.roles)) {
      trace.outcome = ConsensusOutcome{state.tick, *c};
      break;
    }
  }
  return trace;
}

namespace {

GameRecord run_replication(const Scenario& scenario, std::uint64_t rep_seed) {
  Rng stream(rep_seed);
  GameConfig config;
  if (std::holds_alternative<TopologySpec>(scenario.topology)) {
    config.graph = generate(std::get<TopologySpec>(scenario.topology), stream);
  } else {
    config.graph = std::get<Graph>(scenario.topology);
  }
  if (scenario.fixed_roles) {
    config.roles = *scenario.fixed_roles;
  } else {
    config.roles = stackelberg_place(config.graph, scenario.role_spec.visibles,
                                     scenario.role_spec.adversaries,
                                     scenario.role_spec.visible_placement,
                                     scenario.role_spec.adversary_placement, stream);
  }
  config.behavior = scenario.behavior;
  config.ticks = scenario.ticks;
  config.seed = stream.next_u64();

  GameRecord record;
  record.seed = rep_seed;
  record.graph = config.graph;
  record.roles = config.roles;
  record.trace = run_game(config);
  return record;
}

}  // namespace

std::vector<GameRecord> run_batch(const Scenario& scenario, int replications,
                                  std::uint64_t master_seed, int jobs) {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  std::vector<GameRecord> records(replications);
  jobs = std::max(1, std::min(jobs, replications));
  if (jobs == 1) {
    for (int i = 0; i < replications; ++i)
      records[i] = run_replication(scenario, mix_seed(master_seed, i));
    return records;
  }
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < replications; i += jobs)
        records[i] = run_replication(scenario, mix_seed(master_seed, i));
    });
  }
  for (auto& t : workers) t.join();
  return records;
}

}  // namespace consensim
