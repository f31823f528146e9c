#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "consensim/graph.hpp"
#include "consensim/netgen.hpp"

namespace consensim {

enum class Color : unsigned char { White, Red, Green };

inline Color opposite(Color c) {
  if (c == Color::Red) return Color::Green;
  if (c == Color::Green) return Color::Red;
  return Color::White;
}

char color_char(Color c);
Color color_from_char(char c);

enum class DecisionKind : unsigned char { InitialTiming, InitialColor, ChangeTiming };

const char* decision_name(DecisionKind k);

/// Closed feature set shared by all decision models. The enum order is the
/// canonical feature-name order used for serialization and coordinate sweeps.
enum class FeatureName : unsigned char {
  DInv, DVis, NInv, NVis, GInv, GVis, RInv, RVis, OInv, OVis, CInv, CVis
};

inline constexpr int kFeatureCount = 12;

/// Neighbor counts are normalized by the degree cap of the game networks.
inline constexpr double kDegreeNormalization = 15.0;

using Features = std::array<double, kFeatureCount>;

const char* feature_name(FeatureName f);
std::optional<FeatureName> parse_feature_name(std::string_view s);

inline double& feature_at(Features& f, FeatureName name) {
  return f[static_cast<int>(name)];
}
inline double feature_at(const Features& f, FeatureName name) {
  return f[static_cast<int>(name)];
}

/// Linear score under a logistic link; a zero coefficient is the same as an
/// absent feature.
struct LogisticModel {
  double intercept = 0.0;
  Features coefficients{};

  bool operator==(const LogisticModel& o) const {
    return intercept == o.intercept && coefficients == o.coefficients;
  }
};

double logistic_prob(const LogisticModel& model, const Features& features);

/// 18 decision models keyed by (role, has-visible-neighbor, decision kind).
class ModelBank {
public:
  static constexpr int kSlots = 18;

  static int index(Role role, bool has_visible, DecisionKind kind) {
    return static_cast<int>(role) * 6 + (has_visible ? 3 : 0) +
           static_cast<int>(kind);
  }

  LogisticModel& at(Role role, bool has_visible, DecisionKind kind) {
    return models_[index(role, has_visible, kind)];
  }
  const LogisticModel& at(Role role, bool has_visible, DecisionKind kind) const {
    return models_[index(role, has_visible, kind)];
  }
  LogisticModel& slot(int i) { return models_[i]; }
  const LogisticModel& slot(int i) const { return models_[i]; }

  bool operator==(const ModelBank& o) const { return models_ == o.models_; }

private:
  std::array<LogisticModel, kSlots> models_{};
};

/// The published coefficient bank (blank table cells are zero).
ModelBank default_model_bank();

std::string bank_to_json(const ModelBank& bank);
ModelBank bank_from_json(const std::string& text);

/// Per-node decision features at one tick. Neighbors split into the visible
/// group (Role::Visible) and the non-visible group (Regular and Adversarial
/// pooled; team membership is unobserved). Group fractions use the group size
/// as denominator, so undecided (White) neighbors dilute them; empty groups
/// yield 0. O/C features are 0 while own_color is White.
Features extract_features(const std::vector<Color>& colors, const Graph& g,
                          const RoleAssignment& roles, int node,
                          DecisionKind kind, Color own_color);

/// Majority baseline: tally Red vs Green over neighbors, add own color as the
/// tie-break vote when colored; strict majority wins, ties keep own_color,
/// an all-White view returns White (no action).
Color decide_majority(const std::vector<Color>& colors, const Graph& g, int node,
                      Color own_color);

/// Follow-the-leader baseline: color of the lowest-id visible neighbor that
/// has picked one; nullopt when no visible neighbor has (caller falls back to
/// Majority).
std::optional<Color> decide_follow_leader(const std::vector<Color>& colors,
                                          const Graph& g,
                                          const RoleAssignment& roles, int node);

/// Calibration gate for baseline play: visible nodes and their neighbors act
/// at every tick, everyone else only from tick delay on.
bool baseline_gate(int node, const RoleAssignment& roles, const Graph& g,
                   int tick, int delay);

}  // namespace consensim
