#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tennis/category.hpp"
#include "tennis/score_state.hpp"

namespace tennis::ingest {

// Column-name mapping for the point-by-point files. Names here are matched
// against the header row; the parser never assumes positions. Defaults match
// the public Grand Slam point-by-point repository. Optional columns (empty or
// absent from the file) disable the feature they feed.
struct PointsSchema {
  std::string match_id = "match_id";
  std::string set_no = "SetNo";
  std::string game_no = "GameNo";
  std::string point_no = "PointNumber";
  std::string point_winner = "PointWinner";
  std::string point_server = "PointServer";
  // Optional: set winners back the match-winner derivation when the matches
  // file has no winner column.
  std::string set_winner = "SetWinner";
  // Optional: score tokens drive tiebreak detection (integers instead of
  // 0/15/30/40/AD mark tiebreak games).
  std::string p1_score = "P1Score";
  std::string p2_score = "P2Score";
  // Optional explicit tiebreak flag column; takes precedence when mapped.
  std::string tiebreak;
};

struct MatchesSchema {
  std::string match_id = "match_id";
  std::string player1 = "player1";
  std::string player2 = "player2";
  // Optional: empty/absent status treats every row as complete.
  std::string status = "status";
  // Optional: when absent the winner is derived from set winners.
  std::string winner = "winner";
  // Singles draws carry a numeric prefix in the match number (the last
  // dash-separated token of match_id): 1xxx men, 2xxx women. Other prefixes
  // (doubles, juniors) are excluded.
  int men_prefix = 1;
  int women_prefix = 2;
};

struct RawPoint {
  std::string match_id;
  int set_no = 0;
  int game_no = 0;
  int point_no = 0;
  int winner = 0;  // slot: 1 = player1, 2 = player2
  int server = 0;  // slot
  int set_winner = 0;        // slot, 0 unknown
  bool tiebreak_flag = false;   // explicit column
  bool score_vocab_tb = false;  // score token outside the game vocabulary
};

struct RejectedRow {
  long long row = 0;  // 1-based data row number (header excluded)
  std::string reason;
};

struct ParsedPoints {
  std::vector<RawPoint> points;
  std::vector<RejectedRow> rejects;
};

// Throws SchemaError when a required mapped column is missing and
// EmptyInputError when the file has no data rows. Malformed rows land in
// rejects with their row number, never silently dropped.
ParsedPoints parse_points(std::istream& in, const PointsSchema& schema);

struct MatchMeta {
  std::string match_id;
  std::string player1;
  std::string player2;
  std::string status;   // raw token; empty means complete
  int winner_slot = 0;  // from the winner column; 0 when absent/unknown
};

struct ParsedMatches {
  std::vector<MatchMeta> matches;
  std::vector<RejectedRow> rejects;
};

ParsedMatches parse_matches(std::istream& in, const MatchesSchema& schema);

// Point-derived facts filter_matches needs about one match.
struct MatchPointInfo {
  bool has_points = false;
  std::array<int, 2> set_wins{0, 0};  // by slot
};

struct RetainedMatch {
  MatchMeta meta;
  Tour tour = Tour::Men;
  int winner_slot = 0;  // resolved: column first, then set-win majority
};

struct FilterReport {
  long long total = 0;
  long long retired = 0;
  long long walkover = 0;
  long long not_singles = 0;
  long long no_points = 0;
  long long winner_unknown = 0;
  long long retained = 0;
  long long players_seen = 0;
  long long players_eligible = 0;
};

struct FilterResult {
  std::vector<RetainedMatch> matches;
  // Players with at least min_matches retained matches.
  std::set<std::string> eligible_players;
  std::map<std::string, long long> matches_per_player;  // over retained matches
  FilterReport report;
};

// Drops retirements/walkovers (and non-singles draws or matches without
// points or a resolvable winner), then keeps players with at least
// min_matches remaining matches. An empty result is valid.
FilterResult filter_matches(std::span<const MatchMeta> matches,
                            const std::map<std::string, MatchPointInfo>& point_info,
                            const MatchesSchema& schema, int min_matches = 30);

struct PointRecord {
  int state_index = 0;   // server-perspective transient state before the point
  bool server_won = false;
};

struct SegmentedGame {
  int set_no = 0;
  int game_no = 0;
  int server_slot = 0;
  bool tiebreak = false;
  bool complete = false;  // reached game won / game lost
  bool server_won_game = false;
  std::vector<PointRecord> points;  // empty for tiebreaks
};

// Reconstructs the running score of every game in one match from the server's
// perspective (the returner's view is the mirror). Scores past deuce collapse
// onto the 3-3 / AD cycle. Tiebreak games are kept as markers with no point
// records. Throws SegmentationError when a game continues past an absorbing
// state or its point numbers are not strictly increasing.
std::vector<SegmentedGame> segment_games(const std::string& match_id,
                                         std::span<const RawPoint> match_points);

struct StateTally {
  long long played = 0;
  long long won = 0;
};

struct PlayerTallies {
  std::string player;
  Tour tour = Tour::Men;
  Role role = Role::Service;
  std::array<StateTally, ScoreState::kTransientCount> per_state{};
  long long matches = 0;
  long long games = 0;  // completed, non-tiebreak games in this role
  long long match_wins = 0;
  long long match_losses = 0;

  long long points_played() const;
  long long points_won() const;
  double average_pwp() const;
  double match_win_pct() const;
};

// Adds one segmented game to the tallies: the server accumulates the recorded
// states, the returner their mirror with inverted point outcomes.
void accumulate_game(PlayerTallies& tallies, const SegmentedGame& game, bool as_server);

// Per-state tallies of one match for the player occupying `slot`, in the
// given role: service covers the games they served, return the games they
// received. Totals games; match-level counts (matches, match_wins) come from
// the match metadata and are the caller's to add.
PlayerTallies tally_states(const std::string& player, Role role, int slot,
                           std::span<const SegmentedGame> games);

enum class Tier { Low, Mid, High };

inline std::string_view tier_name(Tier t) {
  switch (t) {
    case Tier::Low:
      return "low";
    case Tier::Mid:
      return "mid";
    case Tier::High:
      return "high";
  }
  return "";
}

// Match-winning percentage tiers; both boundaries belong to the middle tier.
Tier assign_tier(double match_win_pct);
Tier assign_tier(double match_win_pct, double low_boundary, double high_boundary);

}  // namespace tennis::ingest
