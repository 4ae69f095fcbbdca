#include "doctest.h"

#include <sstream>

#include "tennis/errors.hpp"
#include "tennis/ingest/csv.hpp"
#include "tennis/ingest/ingest.hpp"

namespace ingest = tennis::ingest;
using tennis::ScoreState;

namespace {

const char* kPointsHeader =
    "match_id,SetNo,GameNo,PointNumber,PointWinner,PointServer,SetWinner,P1Score,P2Score\n";

std::string point_row(const std::string& match, int set, int game, int pt, int winner, int server,
                      const std::string& s1 = "0", const std::string& s2 = "0") {
  std::ostringstream os;
  os << match << ',' << set << ',' << game << ',' << pt << ',' << winner << ',' << server
     << ",0," << s1 << ',' << s2 << '\n';
  return os.str();
}

ingest::ParsedPoints parse(const std::string& content) {
  std::istringstream in(content);
  return ingest::parse_points(in, ingest::PointsSchema{});
}

}  // namespace

TEST_CASE("csv reader handles quoting and crlf") {
  std::istringstream in("a,b,c\r\n1,\"x,y\",\"he said \"\"hi\"\"\"\r\n2,,\n");
  const auto table = ingest::read_csv(in);
  CHECK(table.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][1] == "x,y");
  CHECK(table.rows[0][2] == "he said \"hi\"");
  CHECK(table.rows[1][1] == "");
  CHECK(table.column("b") == 1);
  CHECK(table.column("zzz") == -1);
}

TEST_CASE("csv escape round-trips through the reader") {
  const std::string nasty = "a\"b,c\nd";
  std::istringstream in("h\n" + ingest::csv_escape(nasty) + "\n");
  const auto table = ingest::read_csv(in);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][0] == nasty);
}

TEST_CASE("a well-formed points file parses without rejects") {
  const auto parsed = parse(std::string(kPointsHeader) + point_row("m1", 1, 1, 1, 1, 1) +
                            point_row("m1", 1, 1, 2, 2, 1) + point_row("m1", 1, 1, 3, 1, 1));
  CHECK(parsed.points.size() == 3);
  CHECK(parsed.rejects.empty());
  CHECK(parsed.points[0].match_id == "m1");
  CHECK(parsed.points[1].winner == 2);
}

TEST_CASE("a corrupt winner field becomes a reject with its row number") {
  const auto parsed = parse(std::string(kPointsHeader) + point_row("m1", 1, 1, 1, 1, 1) +
                            "m1,1,1,2,banana,1,0,15,0\n" + point_row("m1", 1, 1, 3, 1, 1));
  CHECK(parsed.points.size() == 2);
  REQUIRE(parsed.rejects.size() == 1);
  CHECK(parsed.rejects[0].row == 2);
}

TEST_CASE("header-only points file is empty input") {
  std::istringstream in(kPointsHeader);
  CHECK_THROWS_AS(ingest::parse_points(in, ingest::PointsSchema{}), tennis::EmptyInputError);
}

TEST_CASE("a missing mapped column names itself in the error") {
  std::istringstream in("match_id,SetNo,GameNo,PointNumber,PointWinner\nm,1,1,1,1\n");
  try {
    ingest::parse_points(in, ingest::PointsSchema{});
    FAIL("expected SchemaError");
  } catch (const tennis::SchemaError& e) {
    CHECK(e.column == "PointServer");
  }
}

TEST_CASE("filtering removes retirements then applies the match threshold") {
  std::vector<ingest::MatchMeta> metas;
  std::map<std::string, ingest::MatchPointInfo> info;
  // Player A: 30 clean matches against distinct opponents -> eligible.
  // Player B: 29 clean -> excluded. Player C: 31 with 2 walkovers -> excluded.
  auto add_match = [&](const std::string& id, const std::string& p1, const std::string& p2,
                       const std::string& status) {
    metas.push_back({id, p1, p2, status, 0});
    ingest::MatchPointInfo mpi;
    mpi.has_points = status.empty();
    mpi.set_wins = {2, 0};
    info[id] = mpi;
  };
  for (int i = 0; i < 30; ++i) {
    add_match("2015-slam-1" + std::to_string(100 + i), "A", "opp" + std::to_string(i), "");
  }
  for (int i = 0; i < 29; ++i) {
    add_match("2016-slam-1" + std::to_string(100 + i), "B", "oppB" + std::to_string(i), "");
  }
  for (int i = 0; i < 29; ++i) {
    add_match("2017-slam-1" + std::to_string(100 + i), "C", "oppC" + std::to_string(i), "");
  }
  add_match("2017-slam-1200", "C", "oppC30", "Walkover");
  add_match("2017-slam-1201", "C", "oppC31", "Walkover");
  add_match("2018-slam-1300", "A", "B", "Retired");

  const auto result = ingest::filter_matches(metas, info, ingest::MatchesSchema{}, 30);
  CHECK(result.eligible_players.count("A") == 1);
  CHECK(result.eligible_players.count("B") == 0);
  CHECK(result.eligible_players.count("C") == 0);
  CHECK(result.report.retired == 1);
  CHECK(result.report.walkover == 2);
  CHECK(result.matches_per_player.at("A") == 30);  // the retired match dropped
  CHECK(result.matches_per_player.at("C") == 29);
}

TEST_CASE("non-singles draws and unknown winners are excluded with reasons") {
  std::vector<ingest::MatchMeta> metas = {
      {"2015-slam-3101", "D1", "D2", "", 0},   // doubles prefix
      {"2015-slam-1101", "A", "B", "", 0},     // winner underivable
      {"2015-slam-1102", "A", "B", "", 2},     // winner from column
  };
  std::map<std::string, ingest::MatchPointInfo> info;
  info["2015-slam-3101"] = {true, {2, 0}};
  info["2015-slam-1101"] = {true, {1, 1}};
  info["2015-slam-1102"] = {true, {0, 0}};
  const auto result = ingest::filter_matches(metas, info, ingest::MatchesSchema{}, 1);
  CHECK(result.report.not_singles == 1);
  CHECK(result.report.winner_unknown == 1);
  REQUIRE(result.matches.size() == 1);
  CHECK(result.matches[0].winner_slot == 2);
}

TEST_CASE("match winner derives from set wins when no column exists") {
  std::vector<ingest::MatchMeta> metas = {{"2015-slam-2101", "W1", "W2", "", 0}};
  std::map<std::string, ingest::MatchPointInfo> info;
  info["2015-slam-2101"] = {true, {1, 2}};
  const auto result = ingest::filter_matches(metas, info, ingest::MatchesSchema{}, 1);
  REQUIRE(result.matches.size() == 1);
  CHECK(result.matches[0].winner_slot == 2);
  CHECK(result.matches[0].tour == tennis::Tour::Women);
}

namespace {

std::vector<ingest::RawPoint> make_game_points(const std::string& match, int set, int game,
                                               int server, const std::string& pattern,
                                               int first_point = 1) {
  // pattern: 'W' = server wins the point, 'L' = server loses it.
  std::vector<ingest::RawPoint> pts;
  int pt = first_point;
  for (char c : pattern) {
    ingest::RawPoint p;
    p.match_id = match;
    p.set_no = set;
    p.game_no = game;
    p.point_no = pt++;
    p.server = server;
    p.winner = (c == 'W') ? server : (server == 1 ? 2 : 1);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_CASE("a swept service game maps to the leading-score path in both views") {
  const auto pts = make_game_points("m", 1, 1, 1, "WWWW");
  const auto games = ingest::segment_games("m", pts);
  REQUIRE(games.size() == 1);
  const auto& g = games[0];
  CHECK(g.complete);
  CHECK(g.server_won_game);
  REQUIRE(g.points.size() == 4);
  CHECK(g.points[0].state_index == ScoreState::from_points(0, 0).index());
  CHECK(g.points[1].state_index == ScoreState::from_points(1, 0).index());
  CHECK(g.points[2].state_index == ScoreState::from_points(2, 0).index());
  CHECK(g.points[3].state_index == ScoreState::from_points(3, 0).index());

  // The returner sees the same points mirrored.
  ingest::PlayerTallies returner;
  ingest::accumulate_game(returner, g, false);
  CHECK(returner.per_state[ScoreState::from_points(0, 0).index()].played == 1);
  CHECK(returner.per_state[ScoreState::from_points(0, 1).index()].played == 1);
  CHECK(returner.per_state[ScoreState::from_points(0, 2).index()].played == 1);
  CHECK(returner.per_state[ScoreState::from_points(0, 3).index()].played == 1);
  CHECK(returner.points_won() == 0);
}

TEST_CASE("a W,W,L,W,W game walks the expected states") {
  const auto pts = make_game_points("m", 1, 2, 1, "WWLWW");
  const auto games = ingest::segment_games("m", pts);
  REQUIRE(games.size() == 1);
  const auto& g = games[0];
  REQUIRE(g.points.size() == 5);
  CHECK(g.points[0].state_index == ScoreState::from_points(0, 0).index());
  CHECK(g.points[1].state_index == ScoreState::from_points(1, 0).index());
  CHECK(g.points[2].state_index == ScoreState::from_points(2, 0).index());
  CHECK(g.points[3].state_index == ScoreState::from_points(2, 1).index());
  CHECK(g.points[4].state_index == ScoreState::from_points(3, 1).index());
  CHECK(g.server_won_game);
}

TEST_CASE("long deuce games stay inside the 18 transient states") {
  // 5-5 in points: deuce cycle engaged twice.
  const auto pts = make_game_points("m", 2, 3, 2, "WWWLLLWLWW");
  const auto games = ingest::segment_games("m", pts);
  REQUIRE(games.size() == 1);
  const auto& g = games[0];
  CHECK(g.complete);
  for (const auto& pr : g.points) {
    CHECK(pr.state_index >= 0);
    CHECK(pr.state_index < 18);
  }
  // Points 7..10 live in the deuce cycle.
  CHECK(g.points[6].state_index == ScoreState::from_points(3, 3).index());
  CHECK(g.points[7].state_index == ScoreState::from_points(4, 3).index());
  CHECK(g.points[8].state_index == ScoreState::from_points(3, 3).index());
  CHECK(g.points[9].state_index == ScoreState::from_points(4, 3).index());
}

TEST_CASE("games continuing past an absorbing state fail segmentation") {
  const auto pts = make_game_points("m", 1, 1, 1, "WWWWW");
  CHECK_THROWS_AS(ingest::segment_games("m", pts), tennis::SegmentationError);
}

TEST_CASE("score vocabulary flags tiebreaks instead of erroring") {
  auto pts = make_game_points("m", 1, 13, 1, "WWWWWWW");
  for (auto& p : pts) p.score_vocab_tb = true;
  const auto games = ingest::segment_games("m", pts);
  REQUIRE(games.size() == 1);
  CHECK(games[0].tiebreak);
  CHECK(games[0].points.empty());
}

TEST_CASE("server rotation marks a tiebreak") {
  auto pts = make_game_points("m", 1, 13, 1, "WWWWWWW");
  pts[3].server = 2;
  const auto games = ingest::segment_games("m", pts);
  REQUIRE(games.size() == 1);
  CHECK(games[0].tiebreak);
}

TEST_CASE("duplicate point numbers fail segmentation") {
  auto pts = make_game_points("m", 1, 1, 1, "WWWW");
  pts[2].point_no = pts[1].point_no;
  CHECK_THROWS_AS(ingest::segment_games("m", pts), tennis::SegmentationError);
}

TEST_CASE("tally accumulation is additive and mirror-consistent") {
  const auto pts = make_game_points("m", 1, 1, 1, "WLWWW");
  const auto games = ingest::segment_games("m", pts);
  REQUIRE(games.size() == 1);

  ingest::PlayerTallies service;
  ingest::accumulate_game(service, games[0], true);
  ingest::accumulate_game(service, games[0], true);
  CHECK(service.games == 2);
  CHECK(service.points_played() == 10);
  CHECK(service.points_won() == 8);

  ingest::PlayerTallies ret;
  ingest::accumulate_game(ret, games[0], false);
  CHECK(ret.points_played() == 5);
  CHECK(ret.points_won() == 1);
  // Mirror identity: state (i, j) for the server matches (j, i) for the
  // returner with won/lost swapped. Service holds the game twice.
  for (int i = 0; i < 18; ++i) {
    const auto j = static_cast<std::size_t>(ScoreState::from_index(i).mirrored().index());
    const auto& s = service.per_state[static_cast<std::size_t>(i)];
    const auto& r = ret.per_state[j];
    CHECK(s.played == 2 * r.played);
    CHECK(s.won == 2 * (r.played - r.won));
  }
}

TEST_CASE("tally_states splits a match by serving slot and role") {
  // Slot 1 serves games 1 and 3, slot 2 serves game 2.
  std::vector<ingest::RawPoint> pts;
  auto extend = [&](std::vector<ingest::RawPoint> more) {
    pts.insert(pts.end(), more.begin(), more.end());
  };
  extend(make_game_points("m", 1, 1, 1, "WWWW", 1));
  extend(make_game_points("m", 1, 2, 2, "WWLWW", 5));
  extend(make_game_points("m", 1, 3, 1, "LLLL", 10));
  const auto games = ingest::segment_games("m", pts);
  REQUIRE(games.size() == 3);

  const auto p1_service = ingest::tally_states("p1", tennis::Role::Service, 1, games);
  CHECK(p1_service.games == 2);
  CHECK(p1_service.points_played() == 8);
  CHECK(p1_service.points_won() == 4);

  const auto p1_return = ingest::tally_states("p1", tennis::Role::Return, 1, games);
  CHECK(p1_return.games == 1);
  CHECK(p1_return.points_played() == 5);
  CHECK(p1_return.points_won() == 1);

  // Two identical inputs double every count.
  std::vector<ingest::SegmentedGame> doubled = games;
  doubled.insert(doubled.end(), games.begin(), games.end());
  const auto twice = ingest::tally_states("p1", tennis::Role::Service, 1, doubled);
  CHECK(twice.points_played() == 2 * p1_service.points_played());
  CHECK(twice.games == 2 * p1_service.games);
  for (int i = 0; i < 18; ++i) {
    CHECK(twice.per_state[static_cast<std::size_t>(i)].won ==
          2 * p1_service.per_state[static_cast<std::size_t>(i)].won);
  }
}

TEST_CASE("tier assignment boundaries") {
  CHECK(ingest::assign_tier(0.72) == ingest::Tier::High);
  CHECK(ingest::assign_tier(0.70) == ingest::Tier::Mid);
  CHECK(ingest::assign_tier(0.50) == ingest::Tier::Mid);
  CHECK(ingest::assign_tier(0.4999) == ingest::Tier::Low);
  CHECK(ingest::assign_tier(0.0) == ingest::Tier::Low);
  CHECK(ingest::assign_tier(1.0) == ingest::Tier::High);
  CHECK_THROWS_AS(ingest::assign_tier(1.2), tennis::ContractViolation);
}
