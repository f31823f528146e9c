#include "consensim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace consensim {

WilsonInterval wilson_interval(long successes, long trials) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval needs trials >= 1");
  constexpr double z = 1.959963984540054;  // 97.5th normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w;
  w.rate = p;
  // clamp away round-off at the boundaries; the interval always contains p
  w.lo = std::min(std::max(0.0, center - half), p);
  w.hi = std::max(std::min(1.0, center + half), p);
  return w;
}

WilsonInterval consensus_rate(const std::vector<GameRecord>& records) {
  if (records.empty()) throw std::invalid_argument("consensus_rate on empty batch");
  long wins = 0;
  for (const auto& r : records) wins += r.trace.outcome.has_value();
  return wilson_interval(wins, static_cast<long>(records.size()));
}

std::vector<DistanceAgreement> agreement_by_distance(
    const std::vector<GameRecord>& records, int min_instances) {
  std::map<int, std::pair<long, long>> tally;  // distance -> (pairs, agreements)
  for (const auto& r : records) {
    const auto dist = pairwise_distances(r.graph);
    const auto& final = r.trace.final_colors();
    const int n = r.graph.node_count();
    for (int i = 0; i < n; ++i) {
      if (r.roles[i] == Role::Adversarial) continue;
      for (int j = i + 1; j < n; ++j) {
        if (r.roles[j] == Role::Adversarial) continue;
        const int d = dist[i][j];
        if (d == kUnreachable) continue;
        auto& [pairs, agree] = tally[d];
        ++pairs;
        if (final[i] != Color::White && final[i] == final[j]) ++agree;
      }
    }
  }
  std::vector<DistanceAgreement> out;
  for (const auto& [d, counts] : tally) {
    if (counts.first < min_instances) continue;
    out.push_back({d, counts.first,
                   static_cast<double>(counts.second) / static_cast<double>(counts.first)});
  }
  return out;
}

ColorChangeStats color_changes_by_role(const std::vector<GameRecord>& records) {
  std::array<long, 3> changes{};
  std::array<long, 3> node_games{};
  for (const auto& r : records) {
    const int n = r.graph.node_count();
    for (int v = 0; v < n; ++v) {
      const int role = static_cast<int>(r.roles[v]);
      ++node_games[role];
      for (std::size_t t = 1; t < r.trace.states.size(); ++t) {
        const Color prev = r.trace.states[t - 1][v];
        const Color cur = r.trace.states[t][v];
        if (prev != Color::White && cur != prev) ++changes[role];
      }
    }
  }
  ColorChangeStats stats;
  stats.node_games = node_games;
  for (int i = 0; i < 3; ++i)
    stats.mean_changes[i] =
        node_games[i] > 0 ? static_cast<double>(changes[i]) / node_games[i] : 0.0;
  return stats;
}

WilsonInterval breakage_rate(const std::vector<GameRecord>& records) {
  if (records.empty()) throw std::invalid_argument("breakage_rate on empty batch");
  long broken = 0;
  for (const auto& r : records) broken += breaks_when_removed(r.graph, r.roles);
  return wilson_interval(broken, static_cast<long>(records.size()));
}

BatchSummary summarize(const std::vector<GameRecord>& records, int min_instances) {
  BatchSummary s;
  s.consensus = consensus_rate(records);
  s.breakage = breakage_rate(records);
  s.color_changes = color_changes_by_role(records);
  s.agreement = agreement_by_distance(records, min_instances);
  return s;
}

}  // namespace consensim
