#include "consensim/trace_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace consensim {

namespace {

std::string colors_to_string(const std::vector<Color>& colors) {
  std::string s;
  s.reserve(colors.size());
  for (Color c : colors) s.push_back(color_char(c));
  return s;
}

std::string roles_to_string(const RoleAssignment& roles) {
  std::string s;
  s.reserve(roles.roles.size());
  for (Role r : roles.roles) {
    switch (r) {
      case Role::Regular: s.push_back('r'); break;
      case Role::Visible: s.push_back('v'); break;
      case Role::Adversarial: s.push_back('a'); break;
    }
  }
  return s;
}

RoleAssignment roles_from_string(const std::string& s) {
  RoleAssignment ra;
  ra.roles.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case 'r': ra.roles.push_back(Role::Regular); break;
      case 'v': ra.roles.push_back(Role::Visible); break;
      case 'a': ra.roles.push_back(Role::Adversarial); break;
      default: throw std::invalid_argument(std::string("bad role char: ") + c);
    }
  }
  return ra;
}

std::vector<Color> colors_from_string(const std::string& s, int n) {
  if (static_cast<int>(s.size()) != n)
    throw std::invalid_argument("state string length mismatch");
  std::vector<Color> colors;
  colors.reserve(n);
  for (char c : s) colors.push_back(color_from_char(c));
  return colors;
}

void validate_monotone(const std::vector<std::vector<Color>>& states) {
  for (std::size_t t = 1; t < states.size(); ++t)
    for (std::size_t v = 0; v < states[t].size(); ++v)
      if (states[t][v] == Color::White && states[t - 1][v] != Color::White)
        throw std::invalid_argument("color reverted to White");
}

}  // namespace

std::string record_to_jsonl(const GameRecord& record, int game_id) {
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& [u, v] : record.graph.edges()) edges.push_back({u, v});
  nlohmann::ordered_json states = nlohmann::ordered_json::array();
  for (const auto& s : record.trace.states) states.push_back(colors_to_string(s));

  nlohmann::ordered_json j{{"game", game_id},
                           {"seed", record.seed},
                           {"n", record.graph.node_count()},
                           {"edges", edges},
                           {"roles", roles_to_string(record.roles)}};
  if (record.trace.outcome) {
    j["outcome"] = "consensus";
    j["consensus_tick"] = record.trace.outcome->tick;
    j["consensus_color"] = std::string(1, color_char(record.trace.outcome->color));
  } else {
    j["outcome"] = "no_consensus";
  }
  j["states"] = states;
  return j.dump();
}

void write_traces_jsonl(std::ostream& out, const std::vector<GameRecord>& records) {
  for (std::size_t i = 0; i < records.size(); ++i)
    out << record_to_jsonl(records[i], static_cast<int>(i)) << '\n';
}

std::vector<GameLogRecord> read_logs_jsonl(std::istream& in) {
  std::vector<GameLogRecord> logs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      GameLogRecord log;
      log.game_id = j.at("game").get<int>();
      log.seed = j.value("seed", std::uint64_t{0});
      const int n = j.at("n").get<int>();
      std::vector<Edge> edges;
      for (const auto& e : j.at("edges"))
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      log.graph = Graph::from_edges(n, std::move(edges));
      log.roles = roles_from_string(j.at("roles").get<std::string>());
      if (log.roles.size() != n)
        throw std::invalid_argument("roles string length mismatch");
      for (const auto& s : j.at("states"))
        log.states.push_back(colors_from_string(s.get<std::string>(), n));
      if (log.states.empty()) throw std::invalid_argument("empty states");
      validate_monotone(log.states);
      if (j.contains("outcome") && j["outcome"] == "consensus") {
        ConsensusOutcome out;
        out.tick = j.at("consensus_tick").get<int>();
        out.color = color_from_char(j.at("consensus_color").get<std::string>().at(0));
        log.outcome = out;
      }
      logs.push_back(std::move(log));
    } catch (const std::exception& e) {
      throw std::invalid_argument("log line " + std::to_string(line_no) + ": " +
                                  e.what());
    }
  }
  return logs;
}

std::vector<GameLogRecord> read_logs_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open log file: " + path);
  return read_logs_jsonl(in);
}

std::vector<GameLogRecord> read_logs_csv(const std::string& csv_path,
                                         const std::string& edges_dir) {
  std::ifstream in(csv_path);
  if (!in) throw std::invalid_argument("cannot open log csv: " + csv_path);

  struct NodeTick {
    int tick;
    int node;
    Color color;
    Role role;
  };
  std::map<int, std::vector<NodeTick>> by_game;

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line))
    throw std::invalid_argument("log csv is empty: " + csv_path);
  ++line_no;
  if (line != "game,tick,node,color,role,visible_flag")
    throw std::invalid_argument("log csv line 1: unexpected header");

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    auto next_field = [&](const char* what) {
      if (!std::getline(ls, field, ','))
        throw std::invalid_argument("log csv line " + std::to_string(line_no) +
                                    ": missing " + what);
      return field;
    };
    try {
      NodeTick nt{};
      const int game = std::stoi(next_field("game"));
      nt.tick = std::stoi(next_field("tick"));
      nt.node = std::stoi(next_field("node"));
      nt.color = color_from_char(next_field("color").at(0));
      const std::string role = next_field("role");
      if (role == "regular") nt.role = Role::Regular;
      else if (role == "visible") nt.role = Role::Visible;
      else if (role == "adversarial") nt.role = Role::Adversarial;
      else throw std::invalid_argument("bad role: " + role);
      next_field("visible_flag");  // derived from graph+roles, not trusted
      by_game[game].push_back(nt);
    } catch (const std::exception& e) {
      throw std::invalid_argument("log csv line " + std::to_string(line_no) + ": " +
                                  e.what());
    }
  }

  std::vector<GameLogRecord> logs;
  for (auto& [game, entries] : by_game) {
    std::ifstream ef(edges_dir + "/" + std::to_string(game) + ".edges");
    if (!ef)
      throw std::invalid_argument("missing edge file for game " +
                                  std::to_string(game));
    std::stringstream buf;
    buf << ef.rdbuf();

    int n = 0, max_tick = -1;
    for (const auto& nt : entries) {
      n = std::max(n, nt.node + 1);
      max_tick = std::max(max_tick, nt.tick);
    }
    GameLogRecord log;
    log.game_id = game;
    log.graph = parse_edge_list(buf.str(), n);
    log.roles.roles.assign(n, Role::Regular);
    log.states.assign(max_tick + 1, std::vector<Color>(n, Color::White));
    std::vector<std::vector<char>> seen(max_tick + 1, std::vector<char>(n, 0));
    for (const auto& nt : entries) {
      log.roles.roles[nt.node] = nt.role;
      log.states[nt.tick][nt.node] = nt.color;
      seen[nt.tick][nt.node] = 1;
    }
    for (int t = 0; t <= max_tick; ++t)
      for (int v = 0; v < n; ++v)
        if (!seen[t][v])
          throw std::invalid_argument("game " + std::to_string(game) +
                                      ": missing row for tick " + std::to_string(t) +
                                      " node " + std::to_string(v));
    validate_monotone(log.states);
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace consensim
