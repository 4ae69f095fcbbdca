#include "doctest.h"

#include <cmath>

#include "tennis/game_chain.hpp"
#include "tennis/simulate.hpp"

using tennis::ScoreState;
using tennis::StrategyVector;

TEST_CASE("sweep games have the four-point path") {
  const auto game = tennis::simulate_game(StrategyVector::constant(1.0), 123);
  CHECK(game.won);
  CHECK(game.points_played == 4);
  REQUIRE(game.states_visited.size() == 4);
  CHECK(game.states_visited[0] == ScoreState::from_points(0, 0));
  CHECK(game.states_visited[1] == ScoreState::from_points(1, 0));
  CHECK(game.states_visited[2] == ScoreState::from_points(2, 0));
  CHECK(game.states_visited[3] == ScoreState::from_points(3, 0));

  const auto lost = tennis::simulate_game(StrategyVector::constant(0.0), 999);
  CHECK(!lost.won);
  CHECK(lost.points_played == 4);
}

TEST_CASE("simulation is deterministic for a fixed seed") {
  const StrategyVector s = StrategyVector::constant(0.43);
  const auto a = tennis::simulate_game(s, 77);
  const auto b = tennis::simulate_game(s, 77);
  CHECK(a.won == b.won);
  CHECK(a.points_played == b.points_played);
  CHECK(a.states_visited.size() == b.states_visited.size());

  const auto agg1 = tennis::simulate_games(s, 10000, 31337);
  const auto agg2 = tennis::simulate_games(s, 10000, 31337);
  CHECK(agg1.wins == agg2.wins);
  CHECK(agg1.total_points == agg2.total_points);
}

TEST_CASE("a million even games land on the exact outcome") {
  const auto agg = tennis::simulate_games(StrategyVector::constant(0.5), 1000000, 2718281828);
  CHECK(std::fabs(agg.win_fraction() - 0.5) < 0.002);
  CHECK(std::fabs(agg.mean_points() - 6.75) < 0.01);
}

TEST_CASE("per-state tallies from simulation track the chain's visit counts") {
  StrategyVector s = StrategyVector::constant(0.55);
  s[4] = 0.3;
  s[15] = 0.7;
  const long long n = 200000;
  const auto agg = tennis::simulate_games(s, n, 1234);
  const auto exact = tennis::solve_chain(s);
  for (int i = 0; i < 18; ++i) {
    const double simulated =
        static_cast<double>(agg.points_played[static_cast<std::size_t>(i)]) /
        static_cast<double>(n);
    CHECK(simulated ==
          doctest::Approx(exact.visit_counts[static_cast<std::size_t>(i)]).epsilon(0.05));
  }
}
