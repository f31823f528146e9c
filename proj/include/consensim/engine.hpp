#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "consensim/behavior.hpp"
#include "consensim/graph.hpp"
#include "consensim/netgen.hpp"
#include "consensim/rng.hpp"

namespace consensim {

/// Baseline play (Majority / Follow-the-leader) with calibration delay.
/// Requires zero adversaries. Nodes start White; a node that opens its turn
/// with no colored signal makes its initial pick uniformly at random at the
/// no-signal hazard rate, so color commitment trickles in over the game.
struct BaselineBehavior {
  int delay = 0;
};

/// Per-tick probability that an unsignaled baseline node seeds a color; the
/// no-signal initial-pick base rate of the timing models.
double baseline_seed_hazard();

using BehaviorSource = std::variant<ModelBank, BaselineBehavior>;

struct GameConfig {
  Graph graph;
  RoleAssignment roles;
  BehaviorSource behavior;
  int ticks = 60;
  std::uint64_t seed = 0;
  std::optional<std::vector<Color>> initial_colors;  // defaults to all-White
};

struct GameState {
  int tick = 0;
  std::vector<Color> colors;
};

struct ConsensusOutcome {
  int tick = 0;
  Color color = Color::White;
};

struct GameTrace {
  std::vector<std::vector<Color>> states;  // tick 0 .. termination tick
  std::optional<ConsensusOutcome> outcome;

  int termination_tick() const { return static_cast<int>(states.size()) - 1; }
  const std::vector<Color>& final_colors() const { return states.back(); }
};

/// The color shared by every non-adversarial node, if all of them have picked
/// one; adversarial colors are ignored.
std::optional<Color> check_consensus(const std::vector<Color>& colors,
                                     const RoleAssignment& roles);

/// One synchronous tick: every node's decision reads the previous state only.
/// Draws are consumed in ascending node-id order, exactly two per node per
/// tick whether used or not, so traces are invariant to decision
/// short-circuiting.
GameState step(const GameState& state, const GameConfig& config, Rng& rng);

/// Full game: private stream from config.seed, consensus checked at tick 0
/// and after each committed tick, stops at first consensus or after
/// config.ticks steps.
GameTrace run_game(const GameConfig& config);

/// Batch scenario. Topology and roles may be fixed or regenerated per
/// replication.
struct RoleSpec {
  int visibles = 0;
  int adversaries = 0;
  Placement visible_placement = Placement::Random;
  Placement adversary_placement = Placement::Random;
};

struct Scenario {
  std::variant<TopologySpec, Graph> topology;
  std::optional<RoleAssignment> fixed_roles;
  RoleSpec role_spec;
  BehaviorSource behavior;
  int ticks = 60;
};

struct GameRecord {
  std::uint64_t seed = 0;  // replication seed (mix of master seed and index)
  Graph graph;
  RoleAssignment roles;
  GameTrace trace;
};

/// Replication i runs entirely off mix_seed(master_seed, i): the stream first
/// drives topology/role generation, then yields the game seed. Output order
/// and contents are independent of jobs.
std::vector<GameRecord> run_batch(const Scenario& scenario, int replications,
                                  std::uint64_t master_seed, int jobs = 1);

}  // namespace consensim
