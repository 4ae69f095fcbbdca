#pragma once

#include <array>

#include "tennis/score_state.hpp"
#include "tennis/strategy.hpp"

namespace tennis {

// Exact game-level outcomes of a strategy, derived from the absorbing chain
// over the 18 transient score states.
struct GameOutcome {
  double win_probability = 0.0;
  double loss_probability = 0.0;
  // Expected number of points contested, i.e. total expected transitions
  // including the absorbing one. Equals the sum of visit_counts.
  double expected_points = 0.0;
  // Expected visits to each transient state starting from 0-0.
  std::array<double, ScoreState::kTransientCount> visit_counts{};
};

// Solves the chain for the given strategy: absorption probabilities from 0-0,
// the fundamental-matrix visit row for the start state, and expected points.
// The 18x18 system (I - Q)^T v = e0 is solved by partial-pivoting Gaussian
// elimination; no simulation, no iteration.
//
// Throws ContractViolation if any probability is outside [0,1] and
// NonAbsorbingError if the total absorption mass differs from 1 by more than
// 1e-9 (e.g. a deuce cycle the chain can never leave).
GameOutcome solve_chain(const StrategyVector& strategy);

// Long-run fraction of points won per game under the strategy: the
// visit-weighted mean of the per-state probabilities. Matches the empirical
// points-won / points-played definition.
double induced_average_pwp(const StrategyVector& strategy);
double induced_average_pwp(const StrategyVector& strategy, const GameOutcome& outcome);

}  // namespace tennis
