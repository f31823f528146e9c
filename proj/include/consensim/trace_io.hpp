#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "consensim/engine.hpp"
#include "consensim/fitting.hpp"

namespace consensim {

/// One JSON-lines trace record: {game, seed, n, edges, roles, outcome,
/// consensus_tick, consensus_color, states}. Roles are a string of r/v/a per
/// node; each state is a string of W/R/G per node.
std::string record_to_jsonl(const GameRecord& record, int game_id);

void write_traces_jsonl(std::ostream& out, const std::vector<GameRecord>& records);

/// Parses JSON-lines game logs; malformed input is rejected with the
/// offending line number. Color monotonicity (no White reversion) is
/// validated.
std::vector<GameLogRecord> read_logs_jsonl(std::istream& in);

std::vector<GameLogRecord> read_logs_jsonl_file(const std::string& path);

/// CSV alternative: columns game,tick,node,color,role,visible_flag plus one
/// edge-list file per game at <edges_dir>/<game>.edges.
std::vector<GameLogRecord> read_logs_csv(const std::string& csv_path,
                                         const std::string& edges_dir);

}  // namespace consensim
