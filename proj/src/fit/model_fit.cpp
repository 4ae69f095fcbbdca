#include "tennis/fit/model_fit.hpp"

#include <cmath>

#include "tennis/errors.hpp"
#include "tennis/game_chain.hpp"

namespace tennis::fit {

EstimatedStrategies estimate_strategies(const ingest::PlayerTallies& tallies) {
  if (tallies.points_played() <= 0) {
    throw EstimationError("no observed points for " + tallies.player);
  }
  const double average = tallies.average_pwp();
  EstimatedStrategies out;
  out.constant = StrategyVector::constant(average);
  for (int i = 0; i < ScoreState::kTransientCount; ++i) {
    const auto& cell = tallies.per_state[static_cast<std::size_t>(i)];
    if (cell.played > 0) {
      out.score_dependent[i] =
          static_cast<double>(cell.won) / static_cast<double>(cell.played);
    } else {
      out.score_dependent[i] = average;
      out.imputed[static_cast<std::size_t>(i)] = true;
    }
  }
  return out;
}

std::vector<MatchObservation> per_match_observations(std::span<const MatchGameStats> matches) {
  std::vector<MatchObservation> out;
  out.reserve(matches.size());
  for (const MatchGameStats& m : matches) {
    if (m.games <= 0) continue;
    MatchObservation obs;
    obs.games = m.games;
    obs.game_win_fraction = static_cast<double>(m.games_won) / static_cast<double>(m.games);
    obs.mean_points = static_cast<double>(m.points) / static_cast<double>(m.games);
    out.push_back(obs);
  }
  return out;
}

CriteriaResult information_criteria(std::span<const double> observed, double predicted, int k) {
  const std::size_t n = observed.size();
  if (n < 1) throw ContractViolation("information criteria need at least one observation");

  double rss = 0.0;
  double mean = 0.0;
  for (double y : observed) mean += y;
  mean /= static_cast<double>(n);
  double tss = 0.0;
  for (double y : observed) {
    rss += (y - predicted) * (y - predicted);
    tss += (y - mean) * (y - mean);
  }
  if (rss <= 0.0) throw DegenerateFitError("perfect fit: residual sum of squares is zero");

  CriteriaResult result;
  result.n = n;
  result.rss = rss;
  const double nn = static_cast<double>(n);
  result.aic = nn * std::log(rss / nn) + 2.0 * k;
  result.bic = nn * std::log(rss / nn) + static_cast<double>(k) * std::log(nn);
  result.r2 = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  if (n > static_cast<std::size_t>(k) + 1) {
    result.adjusted_r2 =
        1.0 - (1.0 - result.r2) * (nn - 1.0) / (nn - static_cast<double>(k) - 1.0);
  }
  return result;
}

ModelComparison compare_models(const EstimatedStrategies& strategies,
                               std::span<const MatchObservation> observations) {
  if (observations.size() < 3) {
    throw EstimationError("model comparison needs at least 3 matches");
  }
  const GameOutcome constant = solve_chain(strategies.constant);
  const GameOutcome score_dep = solve_chain(strategies.score_dependent);

  std::vector<double> win_obs;
  std::vector<double> points_obs;
  win_obs.reserve(observations.size());
  points_obs.reserve(observations.size());
  for (const auto& obs : observations) {
    win_obs.push_back(obs.game_win_fraction);
    points_obs.push_back(obs.mean_points);
  }

  ModelComparison cmp;
  cmp.n_matches = observations.size();
  cmp.constant_win_pred = constant.win_probability;
  cmp.constant_points_pred = constant.expected_points;
  cmp.score_dependent_win_pred = score_dep.win_probability;
  cmp.score_dependent_points_pred = score_dep.expected_points;
  cmp.win.constant = information_criteria(win_obs, constant.win_probability, 1);
  cmp.win.score_dependent = information_criteria(win_obs, score_dep.win_probability, 18);
  cmp.points.constant = information_criteria(points_obs, constant.expected_points, 1);
  cmp.points.score_dependent = information_criteria(points_obs, score_dep.expected_points, 18);
  return cmp;
}

}  // namespace tennis::fit
