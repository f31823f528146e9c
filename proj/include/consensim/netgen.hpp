#pragma once

#include <vector>

#include "consensim/graph.hpp"
#include "consensim/rng.hpp"

namespace consensim {

enum class Role : unsigned char { Regular, Visible, Adversarial };

const char* role_name(Role r);

struct RoleAssignment {
  std::vector<Role> roles;

  int count(Role r) const;
  int size() const { return static_cast<int>(roles.size()); }
  Role operator[](int v) const { return roles[v]; }
  bool operator==(const RoleAssignment& o) const { return roles == o.roles; }
};

enum class TopologyKind { ER, BA, SmallWorld };

struct TopologySpec {
  TopologyKind kind = TopologyKind::ER;
  int n = 0;
  double p = 0.0;       // ER edge probability
  int m = 0;            // BA attachments per arriving node
  double gamma = 1.0;   // BA preferential-attachment exponent
  int k = 0;            // small-world ring degree (even)
  double beta = 0.0;    // small-world rewiring probability
  int max_degree = 15;
  bool require_connected = true;
  int attempt_budget = 10000;
};

// Canonical parameterizations: p chosen as target-average-degree / 19, the
// calibration for the 20-node reference networks (dense 5.1, sparse 2.6).
TopologySpec er_dense_spec(int n);
TopologySpec er_sparse_spec(int n);
TopologySpec ba_spec(int n, int m = 3, double gamma = 1.0);
TopologySpec smallworld_spec(int n, int k, double beta);

Graph gen_er(const TopologySpec& spec, Rng& rng);
Graph gen_ba(const TopologySpec& spec, Rng& rng);
Graph gen_smallworld(const TopologySpec& spec, Rng& rng);
Graph generate(const TopologySpec& spec, Rng& rng);

/// Uniformly random disjoint Visible/Adversarial sets; remainder Regular.
RoleAssignment assign_roles_random(const Graph& g, int visibles, int adversaries,
                                   Rng& rng);

/// Greedy max-coverage selection: repeatedly picks the eligible node adding
/// the most not-yet-covered neighbors (coverage = union of chosen nodes'
/// neighborhoods). Ties break toward the lowest node id.
std::vector<int> place_greedy(const Graph& g, int count,
                              const std::vector<int>& excluded = {});

enum class Placement { Random, Greedy };

const char* placement_name(Placement p);

/// Sequential placement: visible set first, then adversaries among the
/// remaining nodes (greedy placement excludes the visible set).
RoleAssignment stackelberg_place(const Graph& g, int visibles, int adversaries,
                                 Placement visible_strategy,
                                 Placement adversary_strategy, Rng& rng);

/// True iff the subgraph induced on non-adversarial nodes is disconnected.
bool breaks_when_removed(const Graph& g, const RoleAssignment& roles);

}  // namespace consensim
