#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "tennis/ingest/ingest.hpp"
#include "tennis/strategy.hpp"

namespace tennis::fit {

// The two competing models estimated from one player's tallies: a constant
// point-winning probability versus one probability per score state. States
// with no observations take the player's average and are flagged.
struct EstimatedStrategies {
  StrategyVector constant;
  StrategyVector score_dependent;
  std::array<bool, ScoreState::kTransientCount> imputed{};

  bool any_imputed() const {
    for (bool b : imputed) {
      if (b) return true;
    }
    return false;
  }
};

// Throws EstimationError when the tallies hold no points.
EstimatedStrategies estimate_strategies(const ingest::PlayerTallies& tallies);

// Per-match game aggregates for one player/role.
struct MatchGameStats {
  long long games = 0;
  long long games_won = 0;
  long long points = 0;
};

struct MatchObservation {
  double game_win_fraction = 0.0;
  double mean_points = 0.0;
  long long games = 0;
};

// One observation pair per match; matches without games are skipped.
std::vector<MatchObservation> per_match_observations(std::span<const MatchGameStats> matches);

struct CriteriaResult {
  double aic = 0.0;
  double bic = 0.0;
  double r2 = 0.0;
  std::optional<double> adjusted_r2;  // missing when n <= k + 1
  double rss = 0.0;
  std::size_t n = 0;
};

// Gaussian-residual information criteria against a constant prediction:
// AIC = n ln(RSS/n) + 2k, BIC = n ln(RSS/n) + k ln(n). Throws
// DegenerateFitError on a perfect fit (RSS = 0).
CriteriaResult information_criteria(std::span<const double> observed, double predicted, int k);

struct TargetComparison {
  CriteriaResult constant;
  CriteriaResult score_dependent;
};

struct ModelComparison {
  TargetComparison win;     // target: per-match game-win fraction
  TargetComparison points;  // target: per-match mean points per game
  double constant_win_pred = 0.0;
  double constant_points_pred = 0.0;
  double score_dependent_win_pred = 0.0;
  double score_dependent_points_pred = 0.0;
  std::size_t n_matches = 0;
};

// Chain predictions under both models against the per-match observations on
// both targets. k counts probability parameters only: 1 vs 18. Requires at
// least 3 matches.
ModelComparison compare_models(const EstimatedStrategies& strategies,
                               std::span<const MatchObservation> observations);

}  // namespace tennis::fit
