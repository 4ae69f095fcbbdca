#include "tennis/simulate.hpp"

#include <cmath>

#include "tennis/errors.hpp"

namespace tennis {

GameDraw play_game(const StrategyVector& strategy, Rng& rng) {
  ScoreState state = ScoreState::initial();
  int points = 0;
  while (state.transient()) {
    const bool won_point = rng.u01() < strategy.at(state);
    state = state.next(won_point);
    ++points;
  }
  return {state.is_won(), points};
}

SimulatedGame simulate_game(const StrategyVector& strategy, std::uint64_t seed) {
  if (!strategy.valid()) {
    throw ContractViolation("strategy probabilities must lie in [0,1]");
  }
  Rng rng(seed);
  SimulatedGame game;
  ScoreState state = ScoreState::initial();
  while (state.transient()) {
    game.states_visited.push_back(state);
    const bool won_point = rng.u01() < strategy.at(state);
    state = state.next(won_point);
    ++game.points_played;
  }
  game.won = state.is_won();
  return game;
}

SimulationAggregate simulate_games(const StrategyVector& strategy, long long n,
                                   std::uint64_t seed) {
  if (!strategy.valid()) {
    throw ContractViolation("strategy probabilities must lie in [0,1]");
  }
  Rng rng(seed);
  SimulationAggregate agg;
  for (long long g = 0; g < n; ++g) {
    ScoreState state = ScoreState::initial();
    int points = 0;
    while (state.transient()) {
      const int idx = state.index();
      const bool won_point = rng.u01() < strategy[idx];
      ++agg.points_played[static_cast<std::size_t>(idx)];
      if (won_point) ++agg.points_won[static_cast<std::size_t>(idx)];
      state = state.next(won_point);
      ++points;
    }
    ++agg.games;
    if (state.is_won()) ++agg.wins;
    agg.total_points += points;
    agg.sum_points_sq += static_cast<double>(points) * static_cast<double>(points);
  }
  return agg;
}

double SimulationAggregate::win_fraction_se() const {
  const double w = win_fraction();
  return std::sqrt(w * (1.0 - w) / static_cast<double>(games));
}

double SimulationAggregate::mean_points_se() const {
  const double n = static_cast<double>(games);
  const double mean = mean_points();
  const double var = (sum_points_sq - n * mean * mean) / (n - 1.0);
  return std::sqrt(var / n);
}

}  // namespace tennis
