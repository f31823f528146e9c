#include "consensim/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace consensim {

namespace {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool acceptable(const Graph& g, const TopologySpec& spec) {
  if (g.max_degree() > spec.max_degree) return false;
  if (spec.require_connected && !g.connected()) return false;
  return true;
}

[[noreturn]] void infeasible(const char* what) {
  throw GenerationError(std::string("generation infeasible: ") + what);
}

}  // namespace

const char* role_name(Role r) {
  switch (r) {
    case Role::Regular: return "regular";
    case Role::Visible: return "visible";
    case Role::Adversarial: return "adversarial";
  }
  return "?";
}

int RoleAssignment::count(Role r) const {
  return static_cast<int>(std::count(roles.begin(), roles.end(), r));
}

TopologySpec er_dense_spec(int n) {
  TopologySpec s;
  s.kind = TopologyKind::ER;
  s.n = n;
  s.p = 5.1 / 19.0;
  return s;
}

TopologySpec er_sparse_spec(int n) {
  TopologySpec s;
  s.kind = TopologyKind::ER;
  s.n = n;
  s.p = 2.6 / 19.0;
  return s;
}

TopologySpec ba_spec(int n, int m, double gamma) {
  TopologySpec s;
  s.kind = TopologyKind::BA;
  s.n = n;
  s.m = m;
  s.gamma = gamma;
  return s;
}

TopologySpec smallworld_spec(int n, int k, double beta) {
  TopologySpec s;
  s.kind = TopologyKind::SmallWorld;
  s.n = n;
  s.k = k;
  s.beta = beta;
  return s;
}

Graph gen_er(const TopologySpec& spec, Rng& rng) {
  if (spec.kind != TopologyKind::ER) throw std::invalid_argument("spec.kind != ER");
  if (spec.p < 0.0 || spec.p > 1.0) throw std::invalid_argument("p outside [0,1]");
  if (spec.n < 1) throw std::invalid_argument("n < 1");

  for (int attempt = 0; attempt < spec.attempt_budget; ++attempt) {
    std::vector<Edge> edges;
    for (int u = 0; u < spec.n; ++u)
      for (int v = u + 1; v < spec.n; ++v)
        if (rng.bernoulli(spec.p)) edges.emplace_back(u, v);
    Graph g = Graph::from_edges(spec.n, std::move(edges));
    if (acceptable(g, spec)) return g;
  }
  infeasible("ER sample budget exhausted");
}

Graph gen_ba(const TopologySpec& spec, Rng& rng) {
  if (spec.kind != TopologyKind::BA) throw std::invalid_argument("spec.kind != BA");
  if (spec.m < 1) throw std::invalid_argument("m < 1");
  if (spec.m >= spec.n) throw std::invalid_argument("m >= n");

  const int n = spec.n, m = spec.m;
  std::vector<double> weight(n);
  std::vector<int> degree(n);
  std::vector<int> picked;

  for (int attempt = 0; attempt < spec.attempt_budget; ++attempt) {
    std::vector<Edge> edges;
    std::fill(degree.begin(), degree.end(), 0);
    // seed clique on nodes 0..m-1
    for (int u = 0; u < m; ++u)
      for (int v = u + 1; v < m; ++v) {
        edges.emplace_back(u, v);
        ++degree[u];
        ++degree[v];
      }

    bool failed = false;
    for (int t = m; t < n && !failed; ++t) {
      picked.clear();
      for (int pick = 0; pick < m; ++pick) {
        double total = 0.0;
        for (int v = 0; v < t; ++v) {
          bool eligible = degree[v] < spec.max_degree &&
                          std::find(picked.begin(), picked.end(), v) == picked.end();
          // degree-0 seeds (m = 1 only) keep weight 1 so they stay reachable
          weight[v] = eligible ? (degree[v] == 0 ? 1.0 : std::pow(degree[v], spec.gamma)) : 0.0;
          total += weight[v];
        }
        if (total <= 0.0) {
          failed = true;
          break;
        }
        double u = rng.next_double() * total;
        int chosen = -1;
        for (int v = 0; v < t; ++v) {
          u -= weight[v];
          if (u < 0.0) {
            chosen = v;
            break;
          }
        }
        if (chosen < 0) {  // guard against fp round-off at the top end
          for (int v = t - 1; v >= 0; --v)
            if (weight[v] > 0.0) {
              chosen = v;
              break;
            }
        }
        picked.push_back(chosen);
        edges.emplace_back(chosen, t);
        ++degree[chosen];
        ++degree[t];
      }
    }
    if (failed) continue;
    Graph g = Graph::from_edges(n, std::move(edges));
    if (acceptable(g, spec)) return g;
  }
  infeasible("BA sample budget exhausted");
}

Graph gen_smallworld(const TopologySpec& spec, Rng& rng) {
  if (spec.kind != TopologyKind::SmallWorld)
    throw std::invalid_argument("spec.kind != SmallWorld");
  if (spec.k % 2 != 0) throw std::invalid_argument("k must be even");
  if (spec.k >= spec.n) throw std::invalid_argument("k must be < n");
  if (spec.beta < 0.0 || spec.beta > 1.0) throw std::invalid_argument("beta outside [0,1]");

  const int n = spec.n, half = spec.k / 2;
  for (int attempt = 0; attempt < spec.attempt_budget; ++attempt) {
    // adjacency matrix: n is small and membership tests dominate
    std::vector<char> adj(static_cast<std::size_t>(n) * n, 0);
    auto link = [&](int a, int b, char on) {
      adj[static_cast<std::size_t>(a) * n + b] = on;
      adj[static_cast<std::size_t>(b) * n + a] = on;
    };
    for (int j = 1; j <= half; ++j)
      for (int i = 0; i < n; ++i) link(i, (i + j) % n, 1);

    // Watts-Strogatz rewiring: lattice edges scanned ring by ring, each moved
    // with probability beta to a fresh endpoint; edge count never changes.
    for (int j = 1; j <= half; ++j) {
      for (int i = 0; i < n; ++i) {
        int old = (i + j) % n;
        if (!adj[static_cast<std::size_t>(i) * n + old]) continue;  // already moved
        if (!rng.bernoulli(spec.beta)) continue;
        bool saturated = true;
        for (int v = 0; v < n; ++v)
          if (v != i && !adj[static_cast<std::size_t>(i) * n + v]) saturated = false;
        if (saturated) continue;
        int target = i;
        do {
          target = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n)));
        } while (target == i || adj[static_cast<std::size_t>(i) * n + target]);
        link(i, old, 0);
        link(i, target, 1);
      }
    }

    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (adj[static_cast<std::size_t>(u) * n + v]) edges.emplace_back(u, v);
    Graph g = Graph::from_edges(n, std::move(edges));
    if (acceptable(g, spec)) return g;
  }
  infeasible("small-world sample budget exhausted");
}

Graph generate(const TopologySpec& spec, Rng& rng) {
  switch (spec.kind) {
    case TopologyKind::ER: return gen_er(spec, rng);
    case TopologyKind::BA: return gen_ba(spec, rng);
    case TopologyKind::SmallWorld: return gen_smallworld(spec, rng);
  }
  throw std::invalid_argument("unknown topology kind");
}

namespace {

// Uniform sample of `count` ids from `pool` without replacement (partial
// Fisher-Yates; draw order fixed for reproducibility).
std::vector<int> sample_without_replacement(std::vector<int> pool, int count, Rng& rng) {
  std::vector<int> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    int j = i + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(pool.size() - i)));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace

RoleAssignment assign_roles_random(const Graph& g, int visibles, int adversaries,
                                   Rng& rng) {
  const int n = g.node_count();
  if (visibles < 0 || adversaries < 0 || visibles + adversaries > n)
    throw std::invalid_argument("v + a exceeds node count");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  auto special = sample_without_replacement(std::move(pool), visibles + adversaries, rng);
  RoleAssignment ra;
  ra.roles.assign(n, Role::Regular);
  for (int i = 0; i < visibles; ++i) ra.roles[special[i]] = Role::Visible;
  for (int i = visibles; i < visibles + adversaries; ++i)
    ra.roles[special[i]] = Role::Adversarial;
  return ra;
}

std::vector<int> place_greedy(const Graph& g, int count,
                              const std::vector<int>& excluded) {
  const int n = g.node_count();
  std::vector<char> blocked(n, 0);
  for (int v : excluded) blocked[v] = 1;
  int eligible = 0;
  for (int v = 0; v < n; ++v) eligible += !blocked[v];
  if (count > eligible)
    throw std::invalid_argument("count exceeds eligible nodes");

  std::vector<char> covered(n, 0);
  std::vector<int> chosen;
  chosen.reserve(count);
  for (int pick = 0; pick < count; ++pick) {
    int best = -1, best_gain = -1;
    for (int v = 0; v < n; ++v) {
      if (blocked[v]) continue;
      int gain = 0;
      for (int u : g.neighbors(v)) gain += !covered[u];
      if (gain > best_gain) {
        best_gain = gain;
        best = v;
      }
    }
    blocked[best] = 1;
    chosen.push_back(best);
    for (int u : g.neighbors(best)) covered[u] = 1;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

const char* placement_name(Placement p) {
  return p == Placement::Random ? "random" : "greedy";
}

RoleAssignment stackelberg_place(const Graph& g, int visibles, int adversaries,
                                 Placement visible_strategy,
                                 Placement adversary_strategy, Rng& rng) {
  const int n = g.node_count();
  if (visibles + adversaries > n)
    throw std::invalid_argument("v + a exceeds node count");

  std::vector<int> visible_set;
  if (visible_strategy == Placement::Greedy) {
    visible_set = place_greedy(g, visibles);
  } else {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    visible_set = sample_without_replacement(std::move(pool), visibles, rng);
  }

  std::vector<char> is_visible(n, 0);
  for (int v : visible_set) is_visible[v] = 1;

  std::vector<int> adversary_set;
  if (adversary_strategy == Placement::Greedy) {
    adversary_set = place_greedy(g, adversaries, visible_set);
  } else {
    std::vector<int> pool;
    for (int v = 0; v < n; ++v)
      if (!is_visible[v]) pool.push_back(v);
    adversary_set = sample_without_replacement(std::move(pool), adversaries, rng);
  }

  RoleAssignment ra;
  ra.roles.assign(n, Role::Regular);
  for (int v : visible_set) ra.roles[v] = Role::Visible;
  for (int v : adversary_set) ra.roles[v] = Role::Adversarial;
  return ra;
}

bool breaks_when_removed(const Graph& g, const RoleAssignment& roles) {
  const int n = g.node_count();
  int start = -1, team = 0;
  for (int v = 0; v < n; ++v) {
    if (roles[v] != Role::Adversarial) {
      if (start < 0) start = v;
      ++team;
    }
  }
  if (start < 0) throw std::invalid_argument("no non-adversarial node");

  std::vector<char> seen(n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : g.neighbors(u)) {
      if (!seen[v] && roles[v] != Role::Adversarial) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached != team;
}

}  // namespace consensim
