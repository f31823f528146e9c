#pragma once

#include <string>
#include <utility>
#include <vector>

namespace consensim {

using Edge = std::pair<int, int>;  // stored normalized, first < second

/// Undirected simple graph on node ids 0..n-1. Immutable after construction;
/// adjacency lists are kept sorted and consistent with the edge set.
class Graph {
public:
  Graph() = default;

  /// Validates and normalizes: rejects self-loops, duplicate edges and
  /// out-of-range ids; sorts edges and adjacency lists.
  static Graph from_edges(int n, std::vector<Edge> edges);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  int max_degree() const;
  double average_degree() const;
  bool has_edge(int u, int v) const;
  bool connected() const;

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
};

inline constexpr int kUnreachable = -1;  // distance sentinel for disconnected pairs

/// All-pairs shortest-path hop counts by BFS; kUnreachable across components.
std::vector<std::vector<int>> pairwise_distances(const Graph& g);

/// Mean over nodes of (closed neighbor pairs / C(deg,2)); deg<2 contributes 0.
double avg_clustering(const Graph& g);

/// Edge-list text, "u v" per line, ascending.
std::string to_edge_list(const Graph& g);

/// Parses edge-list text. n defaults to max id + 1; pass it explicitly when
/// trailing isolated nodes exist.
Graph parse_edge_list(const std::string& text, int n = -1);

}  // namespace consensim
