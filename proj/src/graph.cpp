#include "consensim/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace consensim {

Graph Graph::from_edges(int n, std::vector<Edge> edges) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  for (auto& [u, v] : edges) {
    if (u == v) throw std::invalid_argument("self-loop rejected");
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge rejected");

  Graph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  g.adj_.assign(n, {});
  for (const auto& [u, v] : g.edges_) {
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());
  return g;
}

int Graph::max_degree() const {
  int best = 0;
  for (const auto& nb : adj_) best = std::max(best, static_cast<int>(nb.size()));
  return best;
}

double Graph::average_degree() const {
  return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(edges_.size()) / n_;
}

bool Graph::has_edge(int u, int v) const {
  if (u == v) return false;
  const auto& nb = adj_[u];
  return std::binary_search(nb.begin(), nb.end(), v);
}

bool Graph::connected() const {
  if (n_ <= 1) return true;
  std::vector<char> seen(n_, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == n_;
}

std::vector<std::vector<int>> pairwise_distances(const Graph& g) {
  const int n = g.node_count();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, kUnreachable));
  std::vector<int> frontier;
  for (int s = 0; s < n; ++s) {
    auto& d = dist[s];
    d[s] = 0;
    frontier.assign(1, s);
    int depth = 0;
    while (!frontier.empty()) {
      ++depth;
      std::vector<int> next;
      for (int u : frontier) {
        for (int v : g.neighbors(u)) {
          if (d[v] == kUnreachable) {
            d[v] = depth;
            next.push_back(v);
          }
        }
      }
      frontier = std::move(next);
    }
  }
  return dist;
}

double avg_clustering(const Graph& g) {
  const int n = g.node_count();
  double total = 0.0;
  for (int v = 0; v < n; ++v) {
    const auto& nb = g.neighbors(v);
    const int d = static_cast<int>(nb.size());
    if (d < 2) continue;
    long closed = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (g.has_edge(nb[i], nb[j])) ++closed;
    total += 2.0 * static_cast<double>(closed) / (static_cast<double>(d) * (d - 1));
  }
  return total / n;
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
  return out.str();
}

Graph parse_edge_list(const std::string& text, int n) {
  std::istringstream in(text);
  std::vector<Edge> edges;
  int max_id = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int u, v;
    if (!(ls >> u >> v)) throw std::invalid_argument("bad edge-list line: " + line);
    edges.emplace_back(u, v);
    max_id = std::max({max_id, u, v});
  }
  if (n < 0) n = max_id + 1;
  return Graph::from_edges(std::max(n, 1), std::move(edges));
}

}  // namespace consensim
