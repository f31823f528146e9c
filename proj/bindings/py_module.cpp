#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "consensim/behavior.hpp"
#include "consensim/engine.hpp"
#include "consensim/metrics.hpp"
#include "consensim/netgen.hpp"
#include "consensim/trace_io.hpp"
#include "consensim/tuning.hpp"

#include <sstream>

namespace py = pybind11;
using namespace consensim;

namespace {

std::string roles_string(const RoleAssignment& roles) {
  std::string s;
  for (Role r : roles.roles)
    s.push_back(r == Role::Regular ? 'r' : (r == Role::Visible ? 'v' : 'a'));
  return s;
}

std::string colors_string(const std::vector<Color>& colors) {
  std::string s;
  for (Color c : colors) s.push_back(color_char(c));
  return s;
}

Placement placement_of(const std::string& s) {
  if (s == "random") return Placement::Random;
  if (s == "greedy") return Placement::Greedy;
  throw std::invalid_argument("placement must be 'random' or 'greedy'");
}

Scenario make_scenario(const TopologySpec& spec, int visibles, int adversaries,
                       const std::string& visible_placement,
                       const std::string& adversary_placement,
                       const ModelBank& bank, int ticks) {
  Scenario sc;
  sc.topology = spec;
  sc.role_spec = {visibles, adversaries, placement_of(visible_placement),
                  placement_of(adversary_placement)};
  sc.behavior = bank;
  sc.ticks = ticks;
  return sc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Agent-based simulator of adversarial consensus games on networks";

  py::class_<Graph>(m, "Graph")
      .def_static(
          "from_edges",
          [](int n, const std::vector<std::pair<int, int>>& edges) {
            return Graph::from_edges(n, edges);
          },
          py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &Graph::node_count)
      .def("edges", [](const Graph& g) { return g.edges(); })
      .def("neighbors", [](const Graph& g, int v) { return g.neighbors(v); })
      .def("degree", &Graph::degree)
      .def("max_degree", &Graph::max_degree)
      .def("average_degree", &Graph::average_degree)
      .def("connected", &Graph::connected)
      .def("avg_clustering", [](const Graph& g) { return avg_clustering(g); })
      .def("pairwise_distances", [](const Graph& g) { return pairwise_distances(g); })
      .def("to_edge_list", [](const Graph& g) { return to_edge_list(g); });

  py::class_<TopologySpec>(m, "TopologySpec");
  m.def("er_spec", [](int n, double p) {
    TopologySpec s;
    s.kind = TopologyKind::ER;
    s.n = n;
    s.p = p;
    return s;
  }, py::arg("n"), py::arg("p"));
  m.def("er_dense_spec", &er_dense_spec, py::arg("n"));
  m.def("er_sparse_spec", &er_sparse_spec, py::arg("n"));
  m.def("ba_spec", &ba_spec, py::arg("n"), py::arg("m") = 3, py::arg("gamma") = 1.0);
  m.def("smallworld_spec", &smallworld_spec, py::arg("n"), py::arg("k"), py::arg("beta"));

  m.def("generate", [](const TopologySpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    return generate(spec, rng);
  }, py::arg("spec"), py::arg("seed"));

  m.def("assign_roles_random",
        [](const Graph& g, int visibles, int adversaries, std::uint64_t seed) {
          Rng rng(seed);
          return roles_string(assign_roles_random(g, visibles, adversaries, rng));
        },
        py::arg("graph"), py::arg("visibles"), py::arg("adversaries"), py::arg("seed"));

  m.def("place_greedy",
        [](const Graph& g, int count, const std::vector<int>& excluded) {
          return place_greedy(g, count, excluded);
        },
        py::arg("graph"), py::arg("count"), py::arg("excluded") = std::vector<int>{});

  py::class_<ModelBank>(m, "ModelBank")
      .def("to_json", [](const ModelBank& b) { return bank_to_json(b); })
      .def_static("from_json", [](const std::string& s) { return bank_from_json(s); })
      .def("coefficient",
           [](const ModelBank& b, const std::string& role, bool has_visible,
              const std::string& decision, const std::string& term) {
             Role r = role == "regular" ? Role::Regular
                      : role == "visible" ? Role::Visible
                                          : Role::Adversarial;
             DecisionKind k = decision == "initial_timing" ? DecisionKind::InitialTiming
                              : decision == "initial_color" ? DecisionKind::InitialColor
                                                            : DecisionKind::ChangeTiming;
             const LogisticModel& model = b.at(r, has_visible, k);
             if (term == "intercept") return model.intercept;
             auto f = parse_feature_name(term);
             if (!f) throw std::invalid_argument("unknown feature: " + term);
             return feature_at(model.coefficients, *f);
           },
           py::arg("role"), py::arg("has_visible"), py::arg("decision"), py::arg("term"));

  m.def("default_model_bank", &default_model_bank);

  m.def("logistic_prob",
        [](double intercept, const std::map<std::string, double>& coefficients,
           const std::map<std::string, double>& features) {
          LogisticModel model;
          model.intercept = intercept;
          Features f{};
          for (const auto& [key, value] : coefficients) {
            auto name = parse_feature_name(key);
            if (!name) throw std::invalid_argument("unknown feature: " + key);
            feature_at(model.coefficients, *name) = value;
          }
          for (const auto& [key, value] : features) {
            auto name = parse_feature_name(key);
            if (!name) throw std::invalid_argument("unknown feature: " + key);
            feature_at(f, *name) = value;
          }
          return logistic_prob(model, f);
        },
        py::arg("intercept"), py::arg("coefficients"), py::arg("features"));

  py::class_<GameRecord>(m, "GameRecord")
      .def_property_readonly("seed", [](const GameRecord& r) { return r.seed; })
      .def_property_readonly("graph", [](const GameRecord& r) { return r.graph; })
      .def_property_readonly("roles", [](const GameRecord& r) { return roles_string(r.roles); })
      .def_property_readonly("consensus",
                             [](const GameRecord& r) { return r.trace.outcome.has_value(); })
      .def_property_readonly("consensus_tick",
                             [](const GameRecord& r) -> py::object {
                               if (!r.trace.outcome) return py::none();
                               return py::int_(r.trace.outcome->tick);
                             })
      .def_property_readonly("states", [](const GameRecord& r) {
        std::vector<std::string> out;
        for (const auto& s : r.trace.states) out.push_back(colors_string(s));
        return out;
      })
      .def("to_jsonl", [](const GameRecord& r, int game_id) {
        return record_to_jsonl(r, game_id);
      }, py::arg("game_id") = 0);

  m.def("run_batch",
        [](const TopologySpec& spec, int visibles, int adversaries,
           const std::string& visible_placement, const std::string& adversary_placement,
           const ModelBank& bank, int ticks, int replications, std::uint64_t seed,
           int jobs) {
          return run_batch(make_scenario(spec, visibles, adversaries, visible_placement,
                                         adversary_placement, bank, ticks),
                           replications, seed, jobs);
        },
        py::arg("spec"), py::arg("visibles") = 0, py::arg("adversaries") = 0,
        py::arg("visible_placement") = "random", py::arg("adversary_placement") = "random",
        py::arg("bank") = default_model_bank(), py::arg("ticks") = 60,
        py::arg("replications") = 100, py::arg("seed") = 0, py::arg("jobs") = 1);

  m.def("consensus_rate", [](const std::vector<GameRecord>& records) {
    auto w = consensus_rate(records);
    return py::make_tuple(w.rate, w.lo, w.hi);
  });

  m.def("breakage_rate", [](const std::vector<GameRecord>& records) {
    auto w = breakage_rate(records);
    return py::make_tuple(w.rate, w.lo, w.hi);
  });

  m.def("wilson_interval", [](long successes, long trials) {
    auto w = wilson_interval(successes, trials);
    return py::make_tuple(w.rate, w.lo, w.hi);
  }, py::arg("successes"), py::arg("trials"));

  m.def("project_l1", [](std::vector<double> v, double epsilon) {
    return project_l1(std::move(v), epsilon);
  }, py::arg("v"), py::arg("epsilon"));

  m.def("mix_seed", [](std::uint64_t master, std::uint64_t index) {
    return mix_seed(master, index);
  }, py::arg("master"), py::arg("index"));
}
