#include "doctest.h"

#include <cmath>

#include "helpers/oracles.hpp"
#include "tennis/game_chain.hpp"
#include "tennis/rng.hpp"
#include "tennis/simulate.hpp"

using tennis::GameOutcome;
using tennis::ScoreState;
using tennis::StrategyVector;
using tennis::induced_average_pwp;
using tennis::solve_chain;

namespace {

StrategyVector random_strategy(tennis::Rng& rng, double lo = 0.05, double hi = 0.95) {
  StrategyVector s;
  for (int i = 0; i < 18; ++i) s[i] = rng.uniform(lo, hi);
  return s;
}

}  // namespace

TEST_CASE("all points won sweeps the game in four points") {
  const GameOutcome out = solve_chain(StrategyVector::constant(1.0));
  CHECK(out.win_probability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.expected_points == doctest::Approx(4.0).epsilon(1e-12));
  for (int i = 0; i < 18; ++i) {
    const ScoreState s = ScoreState::from_index(i);
    const bool on_sweep_path = s.opponent_points() == 0 && s.player_points() <= 3;
    CHECK(out.visit_counts[static_cast<std::size_t>(i)] ==
          doctest::Approx(on_sweep_path ? 1.0 : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("even strategy gives the symmetric outcome") {
  const GameOutcome out = solve_chain(StrategyVector::constant(0.5));
  CHECK(std::fabs(out.win_probability - 0.5) < 1e-12);
  CHECK(std::fabs(out.expected_points - 6.75) < 1e-12);
}

TEST_CASE("constant-p outcomes match the closed-form enumeration") {
  for (int i = 1; i <= 99; ++i) {
    const double p = static_cast<double>(i) / 100.0;
    const GameOutcome out = solve_chain(StrategyVector::constant(p));
    CHECK(std::fabs(out.win_probability - oracles::constant_p_game_win(p)) < 1e-10);
    CHECK(std::fabs(out.expected_points - oracles::constant_p_expected_points(p)) < 1e-10);
  }
  CHECK(solve_chain(StrategyVector::constant(0.6)).win_probability ==
        doctest::Approx(0.7357).epsilon(1e-4));
}

TEST_CASE("basic outcome invariants hold for random strategies") {
  tennis::Rng rng(20240101);
  for (int trial = 0; trial < 200; ++trial) {
    const StrategyVector s = random_strategy(rng);
    const GameOutcome out = solve_chain(s);
    CHECK(std::fabs(out.win_probability + out.loss_probability - 1.0) <= 1e-9);
    CHECK(out.expected_points >= 4.0);
    CHECK(out.visit_counts[0] == doctest::Approx(1.0).epsilon(1e-12));
    double total = 0.0;
    for (double v : out.visit_counts) {
      CHECK(v >= -1e-12);
      total += v;
    }
    CHECK(out.expected_points == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("raising any single probability never lowers the win probability") {
  tennis::Rng rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    StrategyVector s = random_strategy(rng, 0.1, 0.9);
    const int coord = static_cast<int>(rng.index(18));
    const double before = solve_chain(s).win_probability;
    s[coord] = s[coord] + rng.uniform(0.0, 1.0 - s[coord]);
    const double after = solve_chain(s).win_probability;
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("mirrored strategies swap the win probability and keep the length") {
  tennis::Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const StrategyVector s = random_strategy(rng);
    const GameOutcome mine = solve_chain(s);
    const GameOutcome theirs = solve_chain(s.mirrored());
    CHECK(theirs.win_probability == doctest::Approx(1.0 - mine.win_probability).epsilon(1e-9));
    CHECK(theirs.expected_points == doctest::Approx(mine.expected_points).epsilon(1e-9));
  }
}

TEST_CASE("a locked deuce cycle is reported as non-absorbing") {
  // From deuce: win goes to advantage-in, which always returns to deuce;
  // loss goes to advantage-out, which also always returns.
  StrategyVector s = StrategyVector::constant(0.5);
  s[ScoreState::from_points(4, 3).index()] = 0.0;
  s[ScoreState::from_points(3, 4).index()] = 1.0;
  CHECK_THROWS_AS(solve_chain(s), tennis::NonAbsorbingError);
}

TEST_CASE("out-of-range probabilities violate the contract") {
  StrategyVector s = StrategyVector::constant(0.5);
  s[3] = 1.5;
  CHECK_THROWS_AS(solve_chain(s), tennis::ContractViolation);
}

TEST_CASE("induced average of a constant strategy is that constant") {
  CHECK(induced_average_pwp(StrategyVector::constant(0.39)) ==
        doctest::Approx(0.39).epsilon(1e-12));
  CHECK(induced_average_pwp(StrategyVector::constant(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("induced average matches the simulated points-won fraction") {
  StrategyVector s = StrategyVector::constant(0.5);
  s[0] = 0.6;
  const double induced = induced_average_pwp(s);
  const auto agg = tennis::simulate_games(s, 1000000, 42);
  long long played = 0;
  long long won = 0;
  for (int i = 0; i < 18; ++i) {
    played += agg.points_played[static_cast<std::size_t>(i)];
    won += agg.points_won[static_cast<std::size_t>(i)];
  }
  const double empirical = static_cast<double>(won) / static_cast<double>(played);
  CHECK(std::fabs(induced - empirical) < 1e-3);
}
