#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tennis/rng.hpp"
#include "tennis/score_state.hpp"
#include "tennis/strategy.hpp"

namespace tennis {

// Monte Carlo game simulator; the independent oracle for solve_chain.
// Point sampling is pinned: mt19937_64, point won iff u01() < p(state).

struct SimulatedGame {
  bool won = false;
  int points_played = 0;
  std::vector<ScoreState> states_visited;  // transient states, in play order
};

SimulatedGame simulate_game(const StrategyVector& strategy, std::uint64_t seed);

// Plays one game drawing from an existing stream; no per-state path recording.
struct GameDraw {
  bool won;
  int points;
};
GameDraw play_game(const StrategyVector& strategy, Rng& rng);

struct SimulationAggregate {
  long long games = 0;
  long long wins = 0;
  long long total_points = 0;
  double sum_points_sq = 0.0;  // for the standard error of mean points
  std::array<long long, ScoreState::kTransientCount> points_played{};
  std::array<long long, ScoreState::kTransientCount> points_won{};

  double win_fraction() const { return static_cast<double>(wins) / static_cast<double>(games); }
  double mean_points() const {
    return static_cast<double>(total_points) / static_cast<double>(games);
  }
  double win_fraction_se() const;
  double mean_points_se() const;
};

SimulationAggregate simulate_games(const StrategyVector& strategy, long long n,
                                   std::uint64_t seed);

}  // namespace tennis
