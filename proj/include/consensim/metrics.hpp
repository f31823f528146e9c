#pragma once

#include <array>
#include <vector>

#include "consensim/engine.hpp"

namespace consensim {

struct WilsonInterval {
  double rate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson 95% score interval.
WilsonInterval wilson_interval(long successes, long trials);

WilsonInterval consensus_rate(const std::vector<GameRecord>& records);

struct DistanceAgreement {
  int distance = 0;
  long pairs = 0;
  double agreement = 0.0;
};

/// Per hop-distance fraction of consensus-team pairs sharing a final
/// non-White color. Distances with fewer than min_instances pairs (pooled
/// over games) are omitted. White-White pairs count as disagreement.
std::vector<DistanceAgreement> agreement_by_distance(
    const std::vector<GameRecord>& records, int min_instances = 100);

struct ColorChangeStats {
  std::array<double, 3> mean_changes{};  // indexed by Role
  std::array<long, 3> node_games{};
};

/// A change is a Red<->Green flip; the first White->color pick is not one.
ColorChangeStats color_changes_by_role(const std::vector<GameRecord>& records);

WilsonInterval breakage_rate(const std::vector<GameRecord>& records);

struct BatchSummary {
  WilsonInterval consensus;
  WilsonInterval breakage;
  ColorChangeStats color_changes;
  std::vector<DistanceAgreement> agreement;
};

BatchSummary summarize(const std::vector<GameRecord>& records,
                       int min_instances = 100);

}  // namespace consensim
