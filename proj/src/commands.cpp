#include "consensim/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "consensim/engine.hpp"
#include "consensim/fitting.hpp"
#include "consensim/metrics.hpp"
#include "consensim/trace_io.hpp"
#include "consensim/tuning.hpp"

namespace consensim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

json load_config(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config: " + config_path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(config_path + ": " + e.what());
  }
  return j;
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& path, const char* key,
                  double fallback, bool required = false) {
  const json* v = find(j, key);
  if (!v) {
    if (required) fail(path + "." + key, "missing");
    return fallback;
  }
  if (!v->is_number()) fail(path + "." + key, "expected a number");
  return v->get<double>();
}

long get_integer(const json& j, const std::string& path, const char* key,
                 long fallback, bool required = false) {
  const json* v = find(j, key);
  if (!v) {
    if (required) fail(path + "." + key, "missing");
    return fallback;
  }
  if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
  return v->get<long>();
}

bool get_bool(const json& j, const std::string& path, const char* key,
              bool fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& fallback, bool required = false) {
  const json* v = find(j, key);
  if (!v) {
    if (required) fail(path + "." + key, "missing");
    return fallback;
  }
  if (!v->is_string()) fail(path + "." + key, "expected a string");
  return v->get<std::string>();
}

std::vector<long> get_integer_list(const json& j, const std::string& path,
                                   const char* key, std::vector<long> fallback,
                                   bool required = false) {
  const json* v = find(j, key);
  if (!v) {
    if (required) fail(path + "." + key, "missing");
    return fallback;
  }
  if (!v->is_array()) fail(path + "." + key, "expected an array");
  std::vector<long> out;
  for (const auto& e : *v) {
    if (!e.is_number_integer()) fail(path + "." + key, "expected integers");
    out.push_back(e.get<long>());
  }
  return out;
}

std::vector<double> get_number_list(const json& j, const std::string& path,
                                    const char* key, bool required = false) {
  const json* v = find(j, key);
  if (!v) {
    if (required) fail(path + "." + key, "missing");
    return {};
  }
  if (!v->is_array()) fail(path + "." + key, "expected an array");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number()) fail(path + "." + key, "expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

struct NamedTopology {
  std::string label;
  TopologySpec spec;  // n filled per cell
};

NamedTopology parse_topology(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string kind = get_string(j, path, "kind", "", true);
  NamedTopology t;
  if (kind == "er_dense") {
    t.spec = er_dense_spec(0);
  } else if (kind == "er_sparse") {
    t.spec = er_sparse_spec(0);
  } else if (kind == "er") {
    t.spec.kind = TopologyKind::ER;
    t.spec.p = get_number(j, path, "p", 0.0, true);
  } else if (kind == "ba") {
    t.spec.kind = TopologyKind::BA;
    t.spec.m = static_cast<int>(get_integer(j, path, "m", 3));
    t.spec.gamma = get_number(j, path, "gamma", 1.0);
  } else if (kind == "smallworld") {
    t.spec.kind = TopologyKind::SmallWorld;
    t.spec.k = static_cast<int>(get_integer(j, path, "k", 0, true));
    t.spec.beta = get_number(j, path, "beta", 0.0);
  } else {
    fail(path + ".kind", "unknown topology kind '" + kind + "'");
  }
  t.spec.max_degree = static_cast<int>(get_integer(j, path, "max_degree", 15));
  t.spec.require_connected = get_bool(j, path, "require_connected", true);
  t.label = get_string(j, path, "label", kind);
  return t;
}

std::vector<NamedTopology> parse_topologies(const json& j, const std::string& path) {
  std::vector<NamedTopology> out;
  if (const json* list = find(j, "topologies")) {
    if (!list->is_array() || list->empty()) fail(path + ".topologies", "expected a non-empty array");
    for (std::size_t i = 0; i < list->size(); ++i)
      out.push_back(parse_topology((*list)[i], path + ".topologies[" + std::to_string(i) + "]"));
  } else if (const json* one = find(j, "topology")) {
    out.push_back(parse_topology(*one, path + ".topology"));
  } else {
    fail(path + ".topology", "missing");
  }
  return out;
}

Placement parse_placement(const json& j, const std::string& path, const char* key) {
  const std::string s = get_string(j, path, key, "random");
  if (s == "random") return Placement::Random;
  if (s == "greedy") return Placement::Greedy;
  fail(path + "." + key, "expected 'random' or 'greedy'");
}

ModelBank load_bank_file(const std::string& file, const std::string& path) {
  std::ifstream in(file);
  if (!in) fail(path, "cannot open models file: " + file);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return bank_from_json(buf.str());
  } catch (const std::exception& e) {
    fail(path, std::string("bad models file: ") + e.what());
  }
}

BehaviorSource parse_behavior(const json& j, const std::string& path) {
  const json* b = find(j, "behavior");
  if (!b) return default_model_bank();
  const std::string source = get_string(*b, path + ".behavior", "source", "models");
  if (source == "models") {
    const std::string file = get_string(*b, path + ".behavior", "file", "");
    return file.empty() ? default_model_bank() : load_bank_file(file, path + ".behavior.file");
  }
  if (source == "baseline") {
    BaselineBehavior bb;
    bb.delay = static_cast<int>(get_integer(*b, path + ".behavior", "delay", 0));
    if (bb.delay < 0) fail(path + ".behavior.delay", "must be >= 0");
    return bb;
  }
  fail(path + ".behavior.source", "expected 'models' or 'baseline'");
}

int parse_replications(const json& j, const std::string& path,
                       const CliOverrides& overrides) {
  long reps = get_integer(j, path, "replications", 0, !overrides.replications);
  if (overrides.replications) reps = *overrides.replications;
  if (reps < 1) fail(path + ".replications", "must be >= 1");
  return static_cast<int>(reps);
}

std::uint64_t parse_seed(const json& j, const std::string& path,
                         const CliOverrides& overrides) {
  if (overrides.seed) return *overrides.seed;
  const json* v = find(j, "seed");
  if (!v) return 0;
  if (!v->is_number_integer() && !v->is_number_unsigned())
    fail(path + ".seed", "expected an integer");
  return v->get<std::uint64_t>();
}

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::ofstream open_output(const std::string& out_dir, const std::string& name) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output: " + path);
  return out;
}

int team_size_of(const json& j, const std::string& path) {
  return static_cast<int>(get_integer(j, path, "team_size", 20));
}

}  // namespace

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const CliOverrides& overrides) {
  const json cfg = load_config(config_path);
  const std::string path = "$";
  const auto topologies = parse_topologies(cfg, path);
  const int team = team_size_of(cfg, path);
  const auto a_list = get_integer_list(cfg, path, "adversaries", {0});
  const auto v_list = get_integer_list(cfg, path, "visibles", {0});
  const int reps = parse_replications(cfg, path, overrides);
  const std::uint64_t seed = parse_seed(cfg, path, overrides);
  const int ticks = static_cast<int>(get_integer(cfg, path, "ticks", 60));
  const int min_instances = static_cast<int>(get_integer(cfg, path, "min_instances", 100));
  const bool dump_traces = get_bool(cfg, path, "traces", false);
  const bool export_graphs = get_bool(cfg, path, "export_graphs", false);
  const BehaviorSource behavior = parse_behavior(cfg, path);
  const Placement vis_place = parse_placement(cfg, path, "visible_placement");
  const Placement adv_place = parse_placement(cfg, path, "adversary_placement");
  const std::string placement_label =
      std::string(placement_name(vis_place)) + "/" + placement_name(adv_place);

  auto summary = open_output(out_dir, "summary.csv");
  summary << "topology,n,a,v,placement,metric,value,ci_lo,ci_hi,replications\n";
  std::ofstream traces;
  if (dump_traces) traces = open_output(out_dir, "traces.jsonl");

  int cell = 0, game_counter = 0;
  for (const auto& topo : topologies) {
    for (long a : a_list) {
      for (long v : v_list) {
        Scenario scenario;
        TopologySpec spec = topo.spec;
        spec.n = team + static_cast<int>(a);
        scenario.topology = spec;
        scenario.role_spec = {static_cast<int>(v), static_cast<int>(a), vis_place,
                              adv_place};
        scenario.behavior = behavior;
        scenario.ticks = ticks;

        const auto records =
            run_batch(scenario, reps, mix_seed(seed, cell), overrides.jobs);
        const auto s = summarize(records, min_instances);

        auto row = [&](const std::string& metric, double value, bool has_ci,
                       double lo, double hi) {
          summary << topo.label << ',' << spec.n << ',' << a << ',' << v << ','
                  << placement_label << ',' << metric << ',' << fmt6(value) << ','
                  << (has_ci ? fmt6(lo) : "") << ',' << (has_ci ? fmt6(hi) : "")
                  << ',' << reps << '\n';
        };
        row("consensus_rate", s.consensus.rate, true, s.consensus.lo, s.consensus.hi);
        row("breakage_rate", s.breakage.rate, true, s.breakage.lo, s.breakage.hi);
        row("color_changes_regular", s.color_changes.mean_changes[0], false, 0, 0);
        row("color_changes_visible", s.color_changes.mean_changes[1], false, 0, 0);
        row("color_changes_adversarial", s.color_changes.mean_changes[2], false, 0, 0);
        for (const auto& d : s.agreement)
          row("agreement_d" + std::to_string(d.distance), d.agreement, false, 0, 0);

        if (dump_traces)
          for (const auto& r : records)
            traces << record_to_jsonl(r, game_counter++) << '\n';
        if (export_graphs) {
          const std::string dir = out_dir + "/graphs/cell" + std::to_string(cell);
          std::filesystem::create_directories(dir);
          for (std::size_t i = 0; i < records.size(); ++i) {
            std::ofstream ef(dir + "/" + std::to_string(i) + ".edges",
                             std::ios::binary);
            ef << to_edge_list(records[i].graph);
          }
        }
        ++cell;
      }
    }
  }
  return 0;
}

int cmd_baseline(const std::string& config_path, const std::string& out_dir,
                 const CliOverrides& overrides) {
  const json cfg = load_config(config_path);
  const std::string path = "$";
  const auto a_list = get_integer_list(cfg, path, "adversaries", {0});
  for (long a : a_list)
    if (a != 0) fail(path + ".adversaries", "baseline play requires zero adversaries");

  const auto topologies = parse_topologies(cfg, path);
  const int team = team_size_of(cfg, path);
  const auto v_list = get_integer_list(cfg, path, "visibles", {0, 1, 2, 5});
  const auto d_list = get_integer_list(cfg, path, "delays", {}, true);
  const int reps = parse_replications(cfg, path, overrides);
  const std::uint64_t seed = parse_seed(cfg, path, overrides);
  const int ticks = static_cast<int>(get_integer(cfg, path, "ticks", 60));

  auto out = open_output(out_dir, "baseline.csv");
  out << "D,v,rate,ci_lo,ci_hi,replications\n";

  for (std::size_t di = 0; di < d_list.size(); ++di) {
    for (std::size_t vi = 0; vi < v_list.size(); ++vi) {
      const long v = v_list[vi];
      // without visible nodes the gate would freeze everyone until D, which
      // only shortens the game; the v=0 reference line runs at D=0
      const int delay = v == 0 ? 0 : static_cast<int>(d_list[di]);
      const std::uint64_t cell_seed =
          mix_seed(seed, (v == 0 ? 0 : di) * v_list.size() + vi);

      long wins = 0;
      long total = 0;
      for (std::size_t ti = 0; ti < topologies.size(); ++ti) {
        Scenario scenario;
        TopologySpec spec = topologies[ti].spec;
        spec.n = team;
        scenario.topology = spec;
        scenario.role_spec = {static_cast<int>(v), 0, Placement::Random,
                              Placement::Random};
        scenario.behavior = BaselineBehavior{delay};
        scenario.ticks = ticks;
        const auto records =
            run_batch(scenario, reps, mix_seed(cell_seed, ti), overrides.jobs);
        for (const auto& r : records) wins += r.trace.outcome.has_value();
        total += records.size();
      }
      const auto w = wilson_interval(wins, total);
      out << d_list[di] << ',' << v << ',' << fmt6(w.rate) << ',' << fmt6(w.lo)
          << ',' << fmt6(w.hi) << ',' << total << '\n';
    }
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const CliOverrides& overrides) {
  const json cfg = load_config(config_path);
  const std::string path = "$";
  const std::string kind = get_string(cfg, path, "kind", "", true);
  if (kind != "density" && kind != "clustering" && kind != "gamma")
    fail(path + ".kind", "expected density, clustering or gamma");

  const json* topo_json = find(cfg, "topology");
  if (!topo_json) fail(path + ".topology", "missing");
  auto topo = parse_topology(*topo_json, path + ".topology");
  const auto values = get_number_list(cfg, path, "values", true);
  if (values.empty()) fail(path + ".values", "must be non-empty");

  if (kind == "density" && topo.spec.kind == TopologyKind::SmallWorld)
    fail(path + ".topology", "density sweeps need an er or ba topology");
  if (kind == "clustering" && topo.spec.kind != TopologyKind::SmallWorld)
    fail(path + ".topology", "clustering sweeps need a smallworld topology");
  if (kind == "gamma" && topo.spec.kind != TopologyKind::BA)
    fail(path + ".topology", "gamma sweeps need a ba topology");

  const int team = team_size_of(cfg, path);
  const auto a_list = get_integer_list(cfg, path, "adversaries", {0});
  const auto v_list = get_integer_list(cfg, path, "visibles", {0});
  const int reps = parse_replications(cfg, path, overrides);
  const std::uint64_t seed = parse_seed(cfg, path, overrides);
  const int ticks = static_cast<int>(get_integer(cfg, path, "ticks", 60));
  const BehaviorSource behavior = parse_behavior(cfg, path);

  auto out = open_output(out_dir, "sweep.csv");
  out << "kind,param,measured_clustering,a,v,rate,ci_lo,ci_hi,replications\n";

  int cell = 0;
  for (double value : values) {
    TopologySpec spec = topo.spec;
    if (kind == "density") {
      if (spec.kind == TopologyKind::ER) spec.p = value;
      else spec.m = static_cast<int>(value);
    } else if (kind == "clustering") {
      spec.beta = value;
    } else {
      spec.gamma = value;
    }
    for (long a : a_list) {
      for (long v : v_list) {
        spec.n = team + static_cast<int>(a);
        Scenario scenario;
        scenario.topology = spec;
        scenario.role_spec = {static_cast<int>(v), static_cast<int>(a),
                              Placement::Random, Placement::Random};
        scenario.behavior = behavior;
        scenario.ticks = ticks;
        const auto records =
            run_batch(scenario, reps, mix_seed(seed, cell), overrides.jobs);
        const auto w = consensus_rate(records);
        std::string measured;
        if (kind == "clustering") {
          double total = 0.0;
          for (const auto& r : records) total += avg_clustering(r.graph);
          measured = fmt6(total / static_cast<double>(records.size()));
        }
        out << kind << ',' << fmt6(value) << ',' << measured << ',' << a << ','
            << v << ',' << fmt6(w.rate) << ',' << fmt6(w.lo) << ',' << fmt6(w.hi)
            << ',' << reps << '\n';
        ++cell;
      }
    }
  }
  return 0;
}

int cmd_place(const std::string& config_path, const std::string& out_dir,
              const CliOverrides& overrides) {
  const json cfg = load_config(config_path);
  const std::string path = "$";
  const auto topologies = parse_topologies(cfg, path);
  const int team = team_size_of(cfg, path);
  const auto a_list = get_integer_list(cfg, path, "adversaries", {2});
  const auto v_list = get_integer_list(cfg, path, "visibles", {2});
  const int reps = parse_replications(cfg, path, overrides);
  const std::uint64_t seed = parse_seed(cfg, path, overrides);
  const int ticks = static_cast<int>(get_integer(cfg, path, "ticks", 60));
  const BehaviorSource behavior = parse_behavior(cfg, path);

  static constexpr std::pair<Placement, Placement> kCombos[] = {
      {Placement::Random, Placement::Random},
      {Placement::Greedy, Placement::Random},
      {Placement::Random, Placement::Greedy},
      {Placement::Greedy, Placement::Greedy}};

  auto out = open_output(out_dir, "place.csv");
  out << "topology,n,a,v,visible_placement,adversary_placement,rate,ci_lo,ci_hi,"
         "replications\n";

  int cell = 0;
  for (const auto& topo : topologies) {
    for (long a : a_list) {
      for (long v : v_list) {
        for (const auto& [vp, ap] : kCombos) {
          TopologySpec spec = topo.spec;
          spec.n = team + static_cast<int>(a);
          Scenario scenario;
          scenario.topology = spec;
          scenario.role_spec = {static_cast<int>(v), static_cast<int>(a), vp, ap};
          scenario.behavior = behavior;
          scenario.ticks = ticks;
          const auto records =
              run_batch(scenario, reps, mix_seed(seed, cell), overrides.jobs);
          const auto w = consensus_rate(records);
          out << topo.label << ',' << spec.n << ',' << a << ',' << v << ','
              << placement_name(vp) << ',' << placement_name(ap) << ','
              << fmt6(w.rate) << ',' << fmt6(w.lo) << ',' << fmt6(w.hi) << ','
              << reps << '\n';
          ++cell;
        }
      }
    }
  }
  return 0;
}

int cmd_tune(const std::string& config_path, const std::string& out_dir,
             const CliOverrides& overrides) {
  const json cfg = load_config(config_path);
  const std::string path = "$";
  const json* sc = find(cfg, "scenario");
  if (!sc) fail(path + ".scenario", "missing");

  TuneConfig tc;
  tc.epsilon = get_number(cfg, path, "epsilon", 0.0, true);
  tc.passes = static_cast<int>(get_integer(cfg, path, "passes", 1));
  tc.grid_step = get_number(cfg, path, "grid_step", 0.02);
  tc.candidate_range = get_number(cfg, path, "candidate_range", 0.5);
  tc.reps_per_eval = static_cast<int>(get_integer(cfg, path, "reps_per_eval", 100));
  tc.include_intercepts = get_bool(cfg, path, "include_intercepts", true);
  tc.seed = parse_seed(cfg, path, overrides);
  tc.jobs = overrides.jobs;
  if (overrides.replications) tc.reps_per_eval = *overrides.replications;
  if (tc.epsilon < 0) fail(path + ".epsilon", "must be >= 0");
  if (tc.passes < 0) fail(path + ".passes", "must be >= 0");
  if (tc.grid_step <= 0) fail(path + ".grid_step", "must be > 0");
  if (tc.reps_per_eval < 1) fail(path + ".reps_per_eval", "must be >= 1");

  const std::string spath = path + ".scenario";
  const auto topo = parse_topologies(*sc, spath);
  if (topo.size() != 1) fail(spath, "tuning takes a single topology");
  TopologySpec spec = topo[0].spec;
  const int team = team_size_of(*sc, spath);
  const int a = static_cast<int>(get_integer(*sc, spath, "adversaries", 0));
  const int v = static_cast<int>(get_integer(*sc, spath, "visibles", 0));
  spec.n = team + a;
  tc.scenario.topology = spec;
  tc.scenario.role_spec = {v, a, parse_placement(*sc, spath, "visible_placement"),
                           parse_placement(*sc, spath, "adversary_placement")};
  tc.scenario.behavior = parse_behavior(*sc, spath);
  tc.scenario.ticks = static_cast<int>(get_integer(*sc, spath, "ticks", 60));
  if (!std::holds_alternative<ModelBank>(tc.scenario.behavior))
    fail(spath + ".behavior", "tuning requires model behavior");

  const TuneResult result = coordinate_greedy(tc);
  auto out = open_output(out_dir, "tune_report.json");
  out << tune_report_json(tc, result);
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& out_dir,
            const CliOverrides& overrides) {
  const json cfg = load_config(config_path);
  const std::string path = "$";

  std::vector<GameLogRecord> logs;
  const json* src = find(cfg, "logs");
  if (!src) fail(path + ".logs", "missing");
  if (src->is_string()) {
    logs = read_logs_jsonl_file(src->get<std::string>());
  } else if (src->is_object()) {
    const std::string csv = get_string(*src, path + ".logs", "csv", "", true);
    const std::string edges = get_string(*src, path + ".logs", "edges_dir", "", true);
    logs = read_logs_csv(csv, edges);
  } else {
    fail(path + ".logs", "expected a path or {csv, edges_dir}");
  }
  if (logs.empty()) fail(path + ".logs", "no games found");

  FitConfig fc;
  auto grid = get_number_list(cfg, path, "lambda_grid");
  if (!grid.empty()) fc.lambda_grid = grid;
  for (double l : fc.lambda_grid)
    if (l <= 0) fail(path + ".lambda_grid", "lambdas must be > 0");
  fc.folds = static_cast<int>(get_integer(cfg, path, "folds", 5));
  if (fc.folds < 2) fail(path + ".folds", "must be >= 2");
  fc.options.max_iters = static_cast<int>(get_integer(cfg, path, "max_iters", 50000));
  fc.options.tolerance = get_number(cfg, path, "tolerance", 1e-8);

  Rng rng(parse_seed(cfg, path, overrides));
  const RefitResult result = refit_bank(logs, fc, rng);

  auto models = open_output(out_dir, "fitted_models.json");
  models << bank_to_json(result.bank);

  nlohmann::ordered_json slots = nlohmann::ordered_json::array();
  for (Role role : {Role::Regular, Role::Visible, Role::Adversarial}) {
    for (bool has_visible : {false, true}) {
      for (DecisionKind kind : {DecisionKind::InitialTiming, DecisionKind::InitialColor,
                                DecisionKind::ChangeTiming}) {
        const auto& s = result.slots[ModelBank::index(role, has_visible, kind)];
        slots.push_back({{"role", role_name(role)},
                         {"has_visible", has_visible},
                         {"decision", decision_name(kind)},
                         {"rows", s.row_count},
                         {"positives", s.positives},
                         {"placeholder", s.placeholder},
                         {"lambda", s.lambda},
                         {"kkt_residual", s.kkt},
                         {"converged", s.converged}});
      }
    }
  }
  nlohmann::ordered_json report{{"games", logs.size()}, {"slots", slots}};
  auto rep = open_output(out_dir, "fit_report.json");
  rep << report.dump(2) << '\n';
  return 0;
}

int cmd_models(const std::string& out_path, const std::string& check_path) {
  const std::string text = bank_to_json(default_model_bank());
  if (!check_path.empty()) {
    std::ifstream in(check_path);
    if (!in) throw ConfigError("cannot open models file: " + check_path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (bank_from_json(buf.str()) == default_model_bank()) {
      std::fprintf(stdout, "model bank matches the built-in coefficients\n");
      return 0;
    }
    std::fprintf(stderr, "model bank differs from the built-in coefficients\n");
    return 1;
  }
  if (out_path.empty() || out_path == "-") {
    std::fputs(text.c_str(), stdout);
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write models file: " + out_path);
  out << text;
  return 0;
}

}  // namespace consensim
