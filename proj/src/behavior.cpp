#include "consensim/behavior.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace consensim {

char color_char(Color c) {
  switch (c) {
    case Color::White: return 'W';
    case Color::Red: return 'R';
    case Color::Green: return 'G';
  }
  return '?';
}

Color color_from_char(char c) {
  switch (c) {
    case 'W': return Color::White;
    case 'R': return Color::Red;
    case 'G': return Color::Green;
  }
  throw std::invalid_argument(std::string("bad color char: ") + c);
}

const char* decision_name(DecisionKind k) {
  switch (k) {
    case DecisionKind::InitialTiming: return "initial_timing";
    case DecisionKind::InitialColor: return "initial_color";
    case DecisionKind::ChangeTiming: return "change_timing";
  }
  return "?";
}

namespace {
constexpr const char* kFeatureNames[kFeatureCount] = {
    "D_inv", "D_vis", "N_inv", "N_vis", "G_inv", "G_vis",
    "R_inv", "R_vis", "O_inv", "O_vis", "C_inv", "C_vis"};
}

const char* feature_name(FeatureName f) { return kFeatureNames[static_cast<int>(f)]; }

std::optional<FeatureName> parse_feature_name(std::string_view s) {
  for (int i = 0; i < kFeatureCount; ++i)
    if (s == kFeatureNames[i]) return static_cast<FeatureName>(i);
  return std::nullopt;
}

double logistic_prob(const LogisticModel& model, const Features& features) {
  double score = model.intercept;
  for (int i = 0; i < kFeatureCount; ++i) score += model.coefficients[i] * features[i];
  return 1.0 / (1.0 + std::exp(-score));
}

namespace {

LogisticModel make_model(double intercept,
                         std::initializer_list<std::pair<FeatureName, double>> coefs) {
  LogisticModel m;
  m.intercept = intercept;
  for (const auto& [name, value] : coefs) feature_at(m.coefficients, name) = value;
  return m;
}

}  // namespace

ModelBank default_model_bank() {
  using F = FeatureName;
  using D = DecisionKind;
  ModelBank bank;

  // Initial-pick timing
  bank.at(Role::Regular, false, D::InitialTiming) =
      make_model(-1.952, {{F::DInv, 1.29}});
  bank.at(Role::Regular, true, D::InitialTiming) = make_model(
      -2.21, {{F::DInv, 0.548}, {F::DVis, 0.933}, {F::NInv, 0.002}, {F::NVis, 0.016}});
  bank.at(Role::Visible, false, D::InitialTiming) =
      make_model(-2.045, {{F::DInv, 1.742}, {F::NInv, 0.04}});
  bank.at(Role::Visible, true, D::InitialTiming) = make_model(
      -1.734, {{F::DInv, 0.579}, {F::DVis, 0.84}, {F::NInv, -0.061}, {F::NVis, 0.048}});
  bank.at(Role::Adversarial, false, D::InitialTiming) =
      make_model(-2.284, {{F::DInv, 1.25}, {F::NInv, 0.011}});
  bank.at(Role::Adversarial, true, D::InitialTiming) = make_model(
      -2.744, {{F::DInv, 0.802}, {F::DVis, 0.662}, {F::NInv, 0.025}, {F::NVis, 0.155}});

  // Initial color, P(red | pick)
  bank.at(Role::Regular, false, D::InitialColor) =
      make_model(0.0, {{F::GInv, -4.863}, {F::RInv, 5.032}});
  bank.at(Role::Regular, true, D::InitialColor) = make_model(
      -0.066, {{F::GInv, -2.855}, {F::GVis, -2.022}, {F::RInv, 3.453}, {F::RVis, 1.733}});
  bank.at(Role::Visible, false, D::InitialColor) =
      make_model(0.109, {{F::GInv, -4.411}, {F::RInv, 4.202}});
  bank.at(Role::Visible, true, D::InitialColor) = make_model(
      0.188, {{F::GInv, -3.215}, {F::GVis, -1.599}, {F::RInv, 2.395}, {F::RVis, 1.996}});
  bank.at(Role::Adversarial, false, D::InitialColor) =
      make_model(-0.023, {{F::GInv, 0.817}, {F::RInv, -0.649}});
  bank.at(Role::Adversarial, true, D::InitialColor) = make_model(
      -0.286, {{F::GInv, 0.172}, {F::GVis, 0.732}, {F::RInv, -0.204}});

  // Color-change timing
  bank.at(Role::Regular, false, D::ChangeTiming) = make_model(
      -3.979, {{F::OInv, 2.6587}, {F::CInv, -0.330}, {F::NInv, -0.01}});
  bank.at(Role::Regular, true, D::ChangeTiming) =
      make_model(-3.79, {{F::OInv, 1.1},
                         {F::OVis, 1.484},
                         {F::CInv, -0.874},
                         {F::CVis, 0.095},
                         {F::NInv, 0.004},
                         {F::NVis, -0.034}});
  bank.at(Role::Visible, false, D::ChangeTiming) = make_model(
      -4.116, {{F::OInv, 2.703}, {F::CInv, -0.105}, {F::NInv, -0.019}});
  bank.at(Role::Visible, true, D::ChangeTiming) =
      make_model(-3.529, {{F::OInv, 1.075},
                          {F::OVis, 1.27},
                          {F::CInv, -0.333},
                          {F::CVis, -0.291},
                          {F::NInv, -0.065},
                          {F::NVis, 0.009}});
  bank.at(Role::Adversarial, false, D::ChangeTiming) = make_model(
      -2.799, {{F::OInv, -1.131}, {F::CInv, 1.191}, {F::NInv, 0.007}});
  bank.at(Role::Adversarial, true, D::ChangeTiming) =
      make_model(-2.723, {{F::OInv, -0.599},
                          {F::OVis, -0.372},
                          {F::CInv, 0.948},
                          {F::CVis, 0.306},
                          {F::NInv, -0.002},
                          {F::NVis, -0.198}});
  return bank;
}

namespace {

Role role_from_string(const std::string& s) {
  if (s == "regular") return Role::Regular;
  if (s == "visible") return Role::Visible;
  if (s == "adversarial") return Role::Adversarial;
  throw std::invalid_argument("bad role: " + s);
}

DecisionKind decision_from_string(const std::string& s) {
  if (s == "initial_timing") return DecisionKind::InitialTiming;
  if (s == "initial_color") return DecisionKind::InitialColor;
  if (s == "change_timing") return DecisionKind::ChangeTiming;
  throw std::invalid_argument("bad decision kind: " + s);
}

}  // namespace

std::string bank_to_json(const ModelBank& bank) {
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (Role role : {Role::Regular, Role::Visible, Role::Adversarial}) {
    for (bool has_visible : {false, true}) {
      for (DecisionKind kind : {DecisionKind::InitialTiming, DecisionKind::InitialColor,
                                DecisionKind::ChangeTiming}) {
        const LogisticModel& m = bank.at(role, has_visible, kind);
        nlohmann::ordered_json coefs = nlohmann::ordered_json::object();
        for (int i = 0; i < kFeatureCount; ++i)
          if (m.coefficients[i] != 0.0) coefs[kFeatureNames[i]] = m.coefficients[i];
        models.push_back({{"role", role_name(role)},
                          {"has_visible", has_visible},
                          {"decision", decision_name(kind)},
                          {"intercept", m.intercept},
                          {"coefficients", coefs}});
      }
    }
  }
  nlohmann::ordered_json root{{"models", models}};
  return root.dump(2) + "\n";
}

ModelBank bank_from_json(const std::string& text) {
  nlohmann::json root = nlohmann::json::parse(text);
  if (!root.contains("models") || !root["models"].is_array())
    throw std::invalid_argument("model bank json: missing models array");
  ModelBank bank;
  std::array<bool, ModelBank::kSlots> seen{};
  for (const auto& entry : root["models"]) {
    Role role = role_from_string(entry.at("role").get<std::string>());
    bool has_visible = entry.at("has_visible").get<bool>();
    DecisionKind kind = decision_from_string(entry.at("decision").get<std::string>());
    int idx = ModelBank::index(role, has_visible, kind);
    if (seen[idx]) throw std::invalid_argument("model bank json: duplicate slot");
    seen[idx] = true;
    LogisticModel m;
    m.intercept = entry.at("intercept").get<double>();
    for (const auto& [key, value] : entry.at("coefficients").items()) {
      auto f = parse_feature_name(key);
      if (!f) throw std::invalid_argument("model bank json: unknown feature " + key);
      feature_at(m.coefficients, *f) = value.get<double>();
    }
    bank.at(role, has_visible, kind) = m;
  }
  for (bool s : seen)
    if (!s) throw std::invalid_argument("model bank json: missing slots");
  return bank;
}

Features extract_features(const std::vector<Color>& colors, const Graph& g,
                          const RoleAssignment& roles, int node,
                          DecisionKind kind, Color own_color) {
  if (kind == DecisionKind::ChangeTiming) {
    if (own_color == Color::White)
      throw std::invalid_argument("ChangeTiming features need a colored node");
  } else if (own_color != Color::White) {
    throw std::invalid_argument("Initial* features need a White node");
  }

  int n_inv = 0, n_vis = 0;
  int red_inv = 0, green_inv = 0, red_vis = 0, green_vis = 0;
  for (int u : g.neighbors(node)) {
    const bool vis = roles[u] == Role::Visible;
    (vis ? n_vis : n_inv) += 1;
    if (colors[u] == Color::Red) (vis ? red_vis : red_inv) += 1;
    else if (colors[u] == Color::Green) (vis ? green_vis : green_inv) += 1;
  }

  Features f{};
  auto frac = [](int count, int group) {
    return group > 0 ? static_cast<double>(count) / group : 0.0;
  };
  feature_at(f, FeatureName::DInv) = std::abs(frac(red_inv, n_inv) - frac(green_inv, n_inv));
  feature_at(f, FeatureName::DVis) = std::abs(frac(red_vis, n_vis) - frac(green_vis, n_vis));
  feature_at(f, FeatureName::NInv) = n_inv / kDegreeNormalization;
  feature_at(f, FeatureName::NVis) = n_vis / kDegreeNormalization;
  feature_at(f, FeatureName::GInv) = frac(green_inv, n_inv);
  feature_at(f, FeatureName::GVis) = frac(green_vis, n_vis);
  feature_at(f, FeatureName::RInv) = frac(red_inv, n_inv);
  feature_at(f, FeatureName::RVis) = frac(red_vis, n_vis);
  if (own_color != Color::White) {
    const int opp_inv = own_color == Color::Red ? green_inv : red_inv;
    const int same_inv = own_color == Color::Red ? red_inv : green_inv;
    const int opp_vis = own_color == Color::Red ? green_vis : red_vis;
    const int same_vis = own_color == Color::Red ? red_vis : green_vis;
    feature_at(f, FeatureName::OInv) = frac(opp_inv, n_inv);
    feature_at(f, FeatureName::OVis) = frac(opp_vis, n_vis);
    feature_at(f, FeatureName::CInv) = frac(same_inv, n_inv);
    feature_at(f, FeatureName::CVis) = frac(same_vis, n_vis);
  }
  return f;
}

Color decide_majority(const std::vector<Color>& colors, const Graph& g, int node,
                      Color own_color) {
  int red = 0, green = 0;
  for (int u : g.neighbors(node)) {
    if (colors[u] == Color::Red) ++red;
    else if (colors[u] == Color::Green) ++green;
  }
  if (own_color == Color::Red) ++red;
  else if (own_color == Color::Green) ++green;
  if (red > green) return Color::Red;
  if (green > red) return Color::Green;
  return own_color;  // tie keeps the current color; all-White stays White
}

std::optional<Color> decide_follow_leader(const std::vector<Color>& colors,
                                          const Graph& g,
                                          const RoleAssignment& roles, int node) {
  for (int u : g.neighbors(node)) {  // neighbors sorted ascending
    if (roles[u] == Role::Visible && colors[u] != Color::White) return colors[u];
  }
  return std::nullopt;
}

bool baseline_gate(int node, const RoleAssignment& roles, const Graph& g,
                   int tick, int delay) {
  if (roles[node] == Role::Visible) return true;
  for (int u : g.neighbors(node))
    if (roles[u] == Role::Visible) return true;
  return tick >= delay;
}

}  // namespace consensim
