#include "doctest.h"

#include <cmath>
#include <vector>

#include "tennis/errors.hpp"
#include "tennis/fit/model_fit.hpp"
#include "tennis/game_chain.hpp"
#include "tennis/rng.hpp"
#include "tennis/simulate.hpp"

#include "helpers/synthetic.hpp"

namespace fit = tennis::fit;
namespace ingest = tennis::ingest;
using tennis::StrategyVector;

namespace {

ingest::PlayerTallies tallies_from(const std::vector<std::pair<long long, long long>>& cells) {
  ingest::PlayerTallies t;
  t.player = "p";
  for (std::size_t i = 0; i < cells.size() && i < 18; ++i) {
    t.per_state[i].played = cells[i].first;
    t.per_state[i].won = cells[i].second;
  }
  return t;
}

}  // namespace

TEST_CASE("constant model is the average and score-dependent the per-state ratios") {
  std::vector<std::pair<long long, long long>> cells(18, {100, 39});
  cells[0] = {200, 90};   // 0.45
  cells[5] = {100, 30};   // 0.30
  auto t = tallies_from(cells);
  const auto est = fit::estimate_strategies(t);
  const double avg = t.average_pwp();
  for (int i = 0; i < 18; ++i) CHECK(est.constant[i] == doctest::Approx(avg));
  CHECK(est.score_dependent[0] == doctest::Approx(0.45));
  CHECK(est.score_dependent[5] == doctest::Approx(0.30));
  CHECK(est.score_dependent[3] == doctest::Approx(0.39));
  CHECK(!est.any_imputed());
}

TEST_CASE("a single swept service game imputes the unvisited states") {
  std::vector<std::pair<long long, long long>> cells(18, {0, 0});
  cells[0] = cells[1] = cells[3] = cells[6] = {1, 1};  // 0-0, 1-0, 2-0, 3-0
  const auto est = fit::estimate_strategies(tallies_from(cells));
  CHECK(est.score_dependent[0] == 1.0);
  CHECK(est.score_dependent[6] == 1.0);
  // Unvisited states take the average (1.0 here) and are flagged.
  CHECK(est.imputed[2]);
  CHECK(est.score_dependent[2] == 1.0);
  CHECK(est.any_imputed());
}

TEST_CASE("equal per-state ratios collapse the two models onto each other") {
  std::vector<std::pair<long long, long long>> cells(18, {50, 20});
  const auto est = fit::estimate_strategies(tallies_from(cells));
  for (int i = 0; i < 18; ++i) {
    CHECK(est.constant[i] == doctest::Approx(est.score_dependent[i]));
  }
}

TEST_CASE("zero points is an estimation error") {
  ingest::PlayerTallies empty;
  CHECK_THROWS_AS(fit::estimate_strategies(empty), tennis::EstimationError);
}

TEST_CASE("per-match observations are simple ratios") {
  std::vector<fit::MatchGameStats> stats = {{10, 7, 68}, {1, 1, 4}, {0, 0, 0}};
  const auto obs = fit::per_match_observations(stats);
  REQUIRE(obs.size() == 2);  // the empty match drops out
  CHECK(obs[0].game_win_fraction == doctest::Approx(0.7));
  CHECK(obs[0].mean_points == doctest::Approx(6.8));
  CHECK(obs[1].game_win_fraction == 1.0);
  long long total_games = 0;
  for (const auto& o : obs) total_games += o.games;
  CHECK(total_games == 11);
}

TEST_CASE("information criteria on a worked example") {
  // n = 10, RSS = 1, k = 1: AIC = 10 ln(0.1) + 2.
  std::vector<double> obs(10, 0.0);
  obs[0] = 1.0;  // predicted 0 everywhere -> RSS = 1
  const auto r = fit::information_criteria(obs, 0.0, 1);
  CHECK(r.aic == doctest::Approx(10.0 * std::log(0.1) + 2.0).epsilon(1e-12));
  CHECK(r.aic == doctest::Approx(-21.0259).epsilon(1e-4));
  CHECK(r.bic == doctest::Approx(10.0 * std::log(0.1) + std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("perfect fits are reported as degenerate, not clamped") {
  const std::vector<double> obs(5, 2.5);
  CHECK_THROWS_AS(fit::information_criteria(obs, 2.5, 1), tennis::DegenerateFitError);
}

TEST_CASE("bic penalizes parameters by k ln n and bic-aic is exact") {
  std::vector<double> obs(100, 0.0);
  obs[0] = 3.0;
  const auto k1 = fit::information_criteria(obs, 0.1, 1);
  const auto k18 = fit::information_criteria(obs, 0.1, 18);
  CHECK(k18.bic - k1.bic == doctest::Approx(17.0 * std::log(100.0)).epsilon(1e-12));
  CHECK(k1.bic - k1.aic == doctest::Approx(1.0 * (std::log(100.0) - 2.0)).epsilon(1e-12));
  CHECK(k18.bic - k18.aic == doctest::Approx(18.0 * (std::log(100.0) - 2.0)).epsilon(1e-12));
}

TEST_CASE("adjusted r2 goes missing when n is too small for k") {
  std::vector<double> obs(10, 0.0);
  obs[0] = 1.0;
  CHECK(fit::information_criteria(obs, 0.1, 1).adjusted_r2.has_value());
  CHECK(!fit::information_criteria(obs, 0.1, 18).adjusted_r2.has_value());
}

TEST_CASE("equal-ratio tallies give the constant model exactly a 2*17 aic edge") {
  std::vector<std::pair<long long, long long>> cells(18, {60, 24});
  const auto est = fit::estimate_strategies(tallies_from(cells));
  std::vector<fit::MatchGameStats> stats;
  tennis::Rng rng(5);
  for (int m = 0; m < 25; ++m) {
    const long long games = 8 + static_cast<long long>(rng.index(5));
    const long long wins = static_cast<long long>(rng.index(games + 1));
    stats.push_back({games, wins, games * 6 + static_cast<long long>(rng.index(10))});
  }
  const auto obs = fit::per_match_observations(stats);
  const auto cmp = fit::compare_models(est, obs);
  // Identical predictions, identical RSS; only the parameter count differs.
  CHECK(cmp.win.score_dependent.aic - cmp.win.constant.aic == doctest::Approx(34.0));
  CHECK(cmp.points.score_dependent.aic - cmp.points.constant.aic == doctest::Approx(34.0));
  CHECK(cmp.win.constant.rss == doctest::Approx(cmp.win.score_dependent.rss));
}

TEST_CASE("comparison is invariant to match order") {
  std::vector<std::pair<long long, long long>> cells(18, {80, 30});
  cells[2] = {80, 45};
  cells[9] = {80, 20};
  const auto est = fit::estimate_strategies(tallies_from(cells));
  std::vector<fit::MatchGameStats> stats;
  tennis::Rng rng(17);
  for (int m = 0; m < 30; ++m) {
    const long long games = 6 + static_cast<long long>(rng.index(6));
    stats.push_back({games, static_cast<long long>(rng.index(games + 1)), games * 6});
  }
  auto obs = fit::per_match_observations(stats);
  const auto forward = fit::compare_models(est, obs);
  std::reverse(obs.begin(), obs.end());
  const auto backward = fit::compare_models(est, obs);
  CHECK(forward.win.constant.aic == doctest::Approx(backward.win.constant.aic).epsilon(1e-15));
  CHECK(forward.points.score_dependent.bic ==
        doctest::Approx(backward.points.score_dependent.bic).epsilon(1e-15));
}

TEST_CASE("too few matches fail the comparison precondition") {
  std::vector<std::pair<long long, long long>> cells(18, {50, 20});
  const auto est = fit::estimate_strategies(tallies_from(cells));
  std::vector<fit::MatchGameStats> stats = {{5, 3, 30}, {5, 2, 31}};
  const auto obs = fit::per_match_observations(stats);
  CHECK_THROWS_AS(fit::compare_models(est, obs), tennis::EstimationError);
}

TEST_CASE("synthetic score-dependent corpora favor the richer model") {
  // Matches generated from a contrastful leading/trailing allocation: the
  // score-dependent chain prediction tracks the realized outcomes, while the
  // constant twin misses them by a game-level margin.
  const StrategyVector truth = synthetic::leading_trailing_strategy(0.40, 0.12);
  int points_wins = 0;
  int combined_wins = 0;
  const int replicates = 6;
  for (int rep = 0; rep < replicates; ++rep) {
    const auto corpus = synthetic::generate_corpus(truth, 250, 12, 9000 + rep);
    const auto est = fit::estimate_strategies(corpus.tallies);
    const auto obs = fit::per_match_observations(corpus.match_stats);
    const auto cmp = fit::compare_models(est, obs);
    if (cmp.points.score_dependent.aic < cmp.points.constant.aic) ++points_wins;
    if (cmp.win.score_dependent.aic + cmp.points.score_dependent.aic <
        cmp.win.constant.aic + cmp.points.constant.aic) {
      ++combined_wins;
    }
  }
  CHECK(points_wins == replicates);
  CHECK(combined_wins == replicates);
}

TEST_CASE("zero-contrast generators hand the constant model its parameter edge") {
  for (int rep = 0; rep < 4; ++rep) {
    const auto corpus =
        synthetic::generate_corpus(StrategyVector::constant(0.42), 250, 12, 4000 + rep);
    const auto est = fit::estimate_strategies(corpus.tallies);
    const auto obs = fit::per_match_observations(corpus.match_stats);
    const auto cmp = fit::compare_models(est, obs);
    const double d_win = cmp.win.score_dependent.aic - cmp.win.constant.aic;
    const double d_points = cmp.points.score_dependent.aic - cmp.points.constant.aic;
    // Identical true models: only the 2 * 17 parameter penalty plus
    // estimation noise separates the criteria.
    CHECK(d_win == doctest::Approx(34.0).epsilon(0.2));
    CHECK(d_points == doctest::Approx(34.0).epsilon(0.2));
  }
}
