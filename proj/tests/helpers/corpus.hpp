#pragma once

// Deterministic synthetic Grand Slam corpus in the public repository's file
// layout, for end-to-end pipeline tests.

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tennis/rng.hpp"
#include "tennis/score_state.hpp"
#include "tennis/strategy.hpp"

namespace corpus {

struct SyntheticPlayer {
  std::string name;
  // Point-winning probability per state when serving; the returner's view is
  // the complement.
  tennis::StrategyVector serve;
};

inline tennis::StrategyVector serve_strategy(double base, double spread) {
  tennis::StrategyVector s;
  for (int i = 0; i < 18; ++i) {
    const auto st = tennis::ScoreState::from_index(i);
    s[i] = st.player_points() >= st.opponent_points() ? base + spread : base - spread;
  }
  return s;
}

inline const char* score_token(int points) {
  switch (points) {
    case 0: return "0";
    case 1: return "15";
    case 2: return "30";
    case 3: return "40";
    default: return "AD";
  }
}

struct CorpusOptions {
  int rounds = 2;             // each unordered pair plays this many matches
  bool add_retired = true;    // inject one retired match per tour
  bool add_tiebreaks = true;  // one tiebreak game per match (numeric scores)
  std::uint64_t seed = 20240601;
};

namespace detail {

struct PointRow {
  int set_no = 0;
  int game_no = 0;
  int point_no = 0;
  int winner = 0;
  int server = 0;
  int set_winner = 0;
  std::string p1_score = "0";
  std::string p2_score = "0";
};

}  // namespace detail

// Writes <year>-<slam>-points.csv / -matches.csv under dir and returns the
// match count. Men get match numbers 11xx, women 21xx; match winners are only
// derivable from the SetWinner column, as in files without a winner column.
inline int write_corpus(const std::filesystem::path& dir,
                        const std::vector<SyntheticPlayer>& men,
                        const std::vector<SyntheticPlayer>& women, const CorpusOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  tennis::Rng rng(options.seed);

  std::ostringstream points;
  std::ostringstream matches;
  points << "match_id,ElapsedTime,SetNo,GameNo,PointNumber,PointWinner,PointServer,SetWinner,"
            "P1Score,P2Score\n";
  matches << "match_id,year,slam,match_num,player1,player2,status,event_name\n";

  int total_matches = 0;
  auto play_tour = [&](const std::vector<SyntheticPlayer>& players, int prefix) {
    int match_num = prefix * 1000 + 101;
    for (int round = 0; round < options.rounds; ++round) {
      for (std::size_t i = 0; i < players.size(); ++i) {
        for (std::size_t j = i + 1; j < players.size(); ++j) {
          const auto& p1 = players[i];
          const auto& p2 = players[j];
          const std::string match_id = "2099-testslam-" + std::to_string(match_num);
          matches << match_id << ",2099,testslam," << match_num << ',' << p1.name << ','
                  << p2.name << ",Complete,Singles\n";
          ++match_num;
          ++total_matches;

          std::vector<detail::PointRow> rows;
          int point_no = 1;
          int set_no = 1;
          std::array<int, 2> sets_won = {0, 0};
          int game_no_global = 0;
          while (sets_won[0] < 2 && sets_won[1] < 2) {
            std::array<int, 2> games_won = {0, 0};
            int game_in_set = 0;
            int set_winner = 0;
            while (set_winner == 0) {
              ++game_in_set;
              ++game_no_global;
              const int server = 1 + (game_no_global + 1) % 2;
              const auto& strat = server == 1 ? p1.serve : p2.serve;
              tennis::ScoreState state = tennis::ScoreState::initial();
              while (state.transient()) {
                const bool server_won = rng.u01() < strat.at(state);
                detail::PointRow row;
                row.set_no = set_no;
                row.game_no = game_in_set;
                row.point_no = point_no++;
                row.server = server;
                row.winner = server_won ? server : (server == 1 ? 2 : 1);
                const int a = state.player_points();
                const int b = state.opponent_points();
                row.p1_score = server == 1 ? score_token(a) : score_token(b);
                row.p2_score = server == 1 ? score_token(b) : score_token(a);
                rows.push_back(row);
                state = state.next(server_won);
              }
              const int game_winner = state.is_won() ? server : (server == 1 ? 2 : 1);
              ++games_won[static_cast<std::size_t>(game_winner - 1)];
              if (games_won[0] >= 6 || games_won[1] >= 6 || game_in_set >= 11) {
                set_winner = games_won[0] >= games_won[1] ? 1 : 2;
              }
            }

            // One synthetic tiebreak game per first set: numeric score
            // tokens and a rotating server, both real-file tiebreak markers.
            if (options.add_tiebreaks && set_no == 1) {
              ++game_no_global;
              for (int tb_pt = 0; tb_pt < 7; ++tb_pt) {
                detail::PointRow row;
                row.set_no = set_no;
                row.game_no = game_in_set + 1;
                row.point_no = point_no++;
                row.server = 1 + ((tb_pt + 1) / 2) % 2;
                row.winner = 1;
                row.p1_score = std::to_string(tb_pt);
                row.p2_score = "0";
                rows.push_back(row);
              }
            }

            // As in the source files, the set's last row carries SetWinner.
            rows.back().set_winner = set_winner;
            ++sets_won[static_cast<std::size_t>(set_winner - 1)];
            ++set_no;
          }

          for (const auto& r : rows) {
            points << match_id << ",0:00:00," << r.set_no << ',' << r.game_no << ','
                   << r.point_no << ',' << r.winner << ',' << r.server << ',' << r.set_winner
                   << ',' << r.p1_score << ',' << r.p2_score << '\n';
          }
        }
      }
    }
    if (options.add_retired && players.size() >= 2) {
      const int num = prefix * 1000 + 999;
      const std::string match_id = "2099-testslam-" + std::to_string(num);
      matches << match_id << ",2099,testslam," << num << ',' << players[0].name << ','
              << players[1].name << ",Retired,Singles\n";
      ++total_matches;
      points << match_id << ",0:00:00,1,1,1,1,1,0,0,0\n";
    }
  };

  play_tour(men, 1);
  play_tour(women, 2);

  std::ofstream pf(dir / "2099-testslam-points.csv", std::ios::binary);
  pf << points.str();
  std::ofstream mf(dir / "2099-testslam-matches.csv", std::ios::binary);
  mf << matches.str();
  return total_matches;
}

inline std::vector<SyntheticPlayer> default_men() {
  return {
      {"Arthur Sharp", serve_strategy(0.66, 0.05)},
      {"Bela Quick", serve_strategy(0.63, 0.02)},
      {"Casper Steady", serve_strategy(0.61, 0.00)},
      {"Dmitri Flat", serve_strategy(0.59, -0.04)},
  };
}

inline std::vector<SyntheticPlayer> default_women() {
  return {
      {"Eva Sharp", serve_strategy(0.60, 0.05)},
      {"Freya Quick", serve_strategy(0.57, 0.02)},
      {"Gia Steady", serve_strategy(0.55, 0.00)},
      {"Hana Flat", serve_strategy(0.53, -0.04)},
  };
}

}  // namespace corpus
