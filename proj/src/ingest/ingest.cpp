#include "tennis/ingest/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "tennis/errors.hpp"
#include "tennis/ingest/csv.hpp"

namespace tennis::ingest {

namespace {

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Score tokens seen inside regular games. Anything numeric outside this set
// (tiebreaks count points 0, 1, 2, ...) marks the game as a tiebreak.
bool regular_score_token(std::string_view token) {
  return token.empty() || token == "0" || token == "15" || token == "30" || token == "40" ||
         token == "AD";
}

bool tiebreak_score_token(std::string_view token) {
  if (regular_score_token(token)) return false;
  return parse_int(token).has_value();
}

int require_column(const CsvTable& table, const std::string& name) {
  const int idx = table.column(name);
  if (idx < 0) throw SchemaError(name);
  return idx;
}

int optional_column(const CsvTable& table, const std::string& name) {
  if (name.empty()) return -1;
  return table.column(name);
}

bool truthy_flag(std::string_view token) {
  const std::string t = lowercase(token);
  return t == "1" || t == "true" || t == "y" || t == "yes" || t == "t";
}

// Singles-draw prefix of the match number, e.g. 1 for "...-1503".
std::optional<int> draw_prefix(const std::string& match_id) {
  const auto dash = match_id.find_last_of('-');
  const std::string_view tail =
      dash == std::string::npos ? std::string_view(match_id)
                                : std::string_view(match_id).substr(dash + 1);
  const auto num = parse_int(tail);
  if (!num || *num <= 0) return std::nullopt;
  int prefix = *num;
  while (prefix >= 10) prefix /= 10;
  return prefix;
}

}  // namespace

ParsedPoints parse_points(std::istream& in, const PointsSchema& schema) {
  const CsvTable table = read_csv(in);
  if (table.rows.empty()) throw EmptyInputError("points file has a header but no rows");

  const int c_match = require_column(table, schema.match_id);
  const int c_set = require_column(table, schema.set_no);
  const int c_game = require_column(table, schema.game_no);
  const int c_point = require_column(table, schema.point_no);
  const int c_winner = require_column(table, schema.point_winner);
  const int c_server = require_column(table, schema.point_server);
  const int c_set_winner = optional_column(table, schema.set_winner);
  const int c_p1_score = optional_column(table, schema.p1_score);
  const int c_p2_score = optional_column(table, schema.p2_score);
  const int c_tiebreak = optional_column(table, schema.tiebreak);

  ParsedPoints out;
  out.points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const long long row_no = static_cast<long long>(r) + 1;
    auto field = [&](int c) -> std::string_view {
      return c >= 0 && c < static_cast<int>(row.size()) ? std::string_view(row[static_cast<std::size_t>(c)])
                                                        : std::string_view();
    };

    RawPoint p;
    p.match_id = std::string(field(c_match));
    if (p.match_id.empty()) {
      out.rejects.push_back({row_no, "empty match id"});
      continue;
    }
    const auto set_no = parse_int(field(c_set));
    const auto game_no = parse_int(field(c_game));
    const auto point_no = parse_int(field(c_point));
    if (!set_no || !game_no || !point_no) {
      out.rejects.push_back({row_no, "unparseable set/game/point number"});
      continue;
    }
    const auto winner = parse_int(field(c_winner));
    if (!winner || (*winner != 1 && *winner != 2)) {
      out.rejects.push_back({row_no, "point winner not a player slot"});
      continue;
    }
    const auto server = parse_int(field(c_server));
    if (!server || (*server != 1 && *server != 2)) {
      out.rejects.push_back({row_no, "point server not a player slot"});
      continue;
    }
    p.set_no = *set_no;
    p.game_no = *game_no;
    p.point_no = *point_no;
    p.winner = *winner;
    p.server = *server;
    if (c_set_winner >= 0) {
      const auto sw = parse_int(field(c_set_winner));
      if (sw && (*sw == 1 || *sw == 2)) p.set_winner = *sw;
    }
    if (c_tiebreak >= 0) p.tiebreak_flag = truthy_flag(field(c_tiebreak));
    if (c_p1_score >= 0 && tiebreak_score_token(field(c_p1_score))) p.score_vocab_tb = true;
    if (c_p2_score >= 0 && tiebreak_score_token(field(c_p2_score))) p.score_vocab_tb = true;
    out.points.push_back(std::move(p));
  }
  return out;
}

ParsedMatches parse_matches(std::istream& in, const MatchesSchema& schema) {
  const CsvTable table = read_csv(in);
  if (table.rows.empty()) throw EmptyInputError("matches file has a header but no rows");

  const int c_match = require_column(table, schema.match_id);
  const int c_p1 = require_column(table, schema.player1);
  const int c_p2 = require_column(table, schema.player2);
  const int c_status = optional_column(table, schema.status);
  const int c_winner = optional_column(table, schema.winner);

  ParsedMatches out;
  out.matches.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const long long row_no = static_cast<long long>(r) + 1;
    auto field = [&](int c) -> std::string_view {
      return c >= 0 && c < static_cast<int>(row.size()) ? std::string_view(row[static_cast<std::size_t>(c)])
                                                        : std::string_view();
    };
    MatchMeta m;
    m.match_id = std::string(field(c_match));
    m.player1 = std::string(field(c_p1));
    m.player2 = std::string(field(c_p2));
    if (m.match_id.empty() || m.player1.empty() || m.player2.empty()) {
      out.rejects.push_back({row_no, "missing match id or player name"});
      continue;
    }
    m.status = std::string(field(c_status));
    const std::string_view winner = field(c_winner);
    if (!winner.empty()) {
      if (winner == "1" || winner == m.player1) m.winner_slot = 1;
      if (winner == "2" || winner == m.player2) m.winner_slot = 2;
    }
    out.matches.push_back(std::move(m));
  }
  return out;
}

FilterResult filter_matches(std::span<const MatchMeta> matches,
                            const std::map<std::string, MatchPointInfo>& point_info,
                            const MatchesSchema& schema, int min_matches) {
  FilterResult result;
  result.report.total = static_cast<long long>(matches.size());

  for (const MatchMeta& m : matches) {
    const std::string status = lowercase(m.status);
    if (status.find("retire") != std::string::npos || status.find("ret.") != std::string::npos) {
      ++result.report.retired;
      continue;
    }
    if (status.find("walkover") != std::string::npos || status.find("w/o") != std::string::npos) {
      ++result.report.walkover;
      continue;
    }
    const auto prefix = draw_prefix(m.match_id);
    Tour tour;
    if (prefix == schema.men_prefix) {
      tour = Tour::Men;
    } else if (prefix == schema.women_prefix) {
      tour = Tour::Women;
    } else {
      ++result.report.not_singles;
      continue;
    }
    const auto info = point_info.find(m.match_id);
    if (info == point_info.end() || !info->second.has_points) {
      ++result.report.no_points;
      continue;
    }
    int winner = m.winner_slot;
    if (winner == 0) {
      const auto& sets = info->second.set_wins;
      if (sets[0] > sets[1]) winner = 1;
      if (sets[1] > sets[0]) winner = 2;
    }
    if (winner == 0) {
      ++result.report.winner_unknown;
      continue;
    }
    RetainedMatch kept;
    kept.meta = m;
    kept.tour = tour;
    kept.winner_slot = winner;
    result.matches.push_back(std::move(kept));
    ++result.report.retained;
  }

  for (const RetainedMatch& m : result.matches) {
    ++result.matches_per_player[m.meta.player1];
    ++result.matches_per_player[m.meta.player2];
  }
  result.report.players_seen = static_cast<long long>(result.matches_per_player.size());
  for (const auto& [player, count] : result.matches_per_player) {
    if (count >= min_matches) result.eligible_players.insert(player);
  }
  result.report.players_eligible = static_cast<long long>(result.eligible_players.size());
  return result;
}

std::vector<SegmentedGame> segment_games(const std::string& match_id,
                                         std::span<const RawPoint> match_points) {
  std::vector<RawPoint> pts(match_points.begin(), match_points.end());
  std::stable_sort(pts.begin(), pts.end(), [](const RawPoint& a, const RawPoint& b) {
    if (a.set_no != b.set_no) return a.set_no < b.set_no;
    if (a.game_no != b.game_no) return a.game_no < b.game_no;
    return a.point_no < b.point_no;
  });

  std::vector<SegmentedGame> games;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    while (j < pts.size() && pts[j].set_no == pts[i].set_no && pts[j].game_no == pts[i].game_no) {
      ++j;
    }

    SegmentedGame game;
    game.set_no = pts[i].set_no;
    game.game_no = pts[i].game_no;
    game.server_slot = pts[i].server;

    bool tiebreak = false;
    bool server_varies = false;
    for (std::size_t k = i; k < j; ++k) {
      if (pts[k].tiebreak_flag || pts[k].score_vocab_tb) tiebreak = true;
      if (pts[k].server != game.server_slot) server_varies = true;
      if (k > i && pts[k].point_no <= pts[k - 1].point_no) {
        throw SegmentationError(match_id, game.set_no, game.game_no,
                                "point numbers not strictly increasing");
      }
    }
    // Serve rotates only inside tiebreaks; treat rotation as tiebreak
    // evidence rather than a hard error.
    if (server_varies) tiebreak = true;

    if (tiebreak) {
      game.tiebreak = true;
      games.push_back(std::move(game));
      i = j;
      continue;
    }

    ScoreState state = ScoreState::initial();
    for (std::size_t k = i; k < j; ++k) {
      if (state.absorbing()) {
        throw SegmentationError(match_id, game.set_no, game.game_no,
                                "game continues past an absorbing state");
      }
      const bool server_won = pts[k].winner == game.server_slot;
      game.points.push_back({state.index(), server_won});
      state = state.next(server_won);
    }
    game.complete = state.absorbing();
    game.server_won_game = state.is_won();
    games.push_back(std::move(game));
    i = j;
  }
  return games;
}

long long PlayerTallies::points_played() const {
  long long total = 0;
  for (const auto& s : per_state) total += s.played;
  return total;
}

long long PlayerTallies::points_won() const {
  long long total = 0;
  for (const auto& s : per_state) total += s.won;
  return total;
}

double PlayerTallies::average_pwp() const {
  const long long played = points_played();
  return played > 0 ? static_cast<double>(points_won()) / static_cast<double>(played) : 0.0;
}

double PlayerTallies::match_win_pct() const {
  return matches > 0 ? static_cast<double>(match_wins) / static_cast<double>(matches) : 0.0;
}

void accumulate_game(PlayerTallies& tallies, const SegmentedGame& game, bool as_server) {
  if (game.tiebreak) return;
  for (const PointRecord& pt : game.points) {
    const int idx = as_server
                        ? pt.state_index
                        : ScoreState::from_index(pt.state_index).mirrored().index();
    const bool won = as_server ? pt.server_won : !pt.server_won;
    auto& cell = tallies.per_state[static_cast<std::size_t>(idx)];
    ++cell.played;
    if (won) ++cell.won;
  }
  if (game.complete) ++tallies.games;
}

PlayerTallies tally_states(const std::string& player, Role role, int slot,
                           std::span<const SegmentedGame> games) {
  PlayerTallies tallies;
  tallies.player = player;
  tallies.role = role;
  const bool as_server = role == Role::Service;
  for (const SegmentedGame& game : games) {
    const bool served = game.server_slot == slot;
    if (served != as_server) continue;
    accumulate_game(tallies, game, as_server);
  }
  return tallies;
}

Tier assign_tier(double match_win_pct, double low_boundary, double high_boundary) {
  if (!(match_win_pct >= 0.0 && match_win_pct <= 1.0)) {
    throw ContractViolation("match-win percentage must lie in [0,1]");
  }
  if (match_win_pct < low_boundary) return Tier::Low;
  if (match_win_pct <= high_boundary) return Tier::Mid;
  return Tier::High;
}

Tier assign_tier(double match_win_pct) { return assign_tier(match_win_pct, 0.50, 0.70); }

}  // namespace tennis::ingest
