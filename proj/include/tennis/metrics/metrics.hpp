#pragma once

#include <vector>

#include "tennis/opt/frontier.hpp"
#include "tennis/strategy.hpp"

namespace tennis::metrics {

// Outcome-space distance target: the piecewise-linear curve through the
// sorted frontier points, or the discrete point set.
enum class DistanceMode { Curve, PointSet };

// Normalization bounds span the frontier points and the observed outcome on
// each axis, so every normalized coordinate lands in [0,1] and no distance
// can exceed sqrt(2). A zero-range axis maps everything to 0.5.
struct NormBounds {
  double win_lo = 0.0, win_hi = 1.0;
  double pts_lo = 0.0, pts_hi = 1.0;
};

NormBounds normalization_bounds(const opt::Frontier& frontier, const opt::OutcomePair& observed);

struct Norm2 {
  double u = 0.0;  // normalized win probability
  double v = 0.0;  // normalized expected points
};

Norm2 normalize(const opt::OutcomePair& outcome, const NormBounds& bounds);

struct EfficiencyResult {
  double efficiency = 0.0;        // 1 - distance / sqrt(2)
  double distance = 0.0;          // shortest normalized distance
  bool degenerate_frontier = false;  // single-point frontier
};

// Proximity of the observed outcome to the frontier in normalized outcome
// space, scored on [0,1] with 1 at zero distance. Throws ContractViolation on
// an empty frontier.
EfficiencyResult efficiency_score(const opt::OutcomePair& observed, const opt::Frontier& frontier,
                                  DistanceMode mode = DistanceMode::Curve);

// Frontier point nearest to the observed outcome in the same normalized
// space; ties break toward the higher win probability.
int closest_optimal_index(const opt::OutcomePair& observed, const opt::Frontier& frontier);
const StrategyVector& closest_optimal_strategy(const opt::OutcomePair& observed,
                                               const opt::Frontier& frontier);

struct FitResult {
  double fit = 0.0;      // 1 - d_in / (sqrt(18) * delta_p), clamped to [0,1]
  double distance = 0.0; // d_in
  bool clamped = false;  // observed strategy fell outside the search box
};

FitResult strategy_fit(const StrategyVector& observed, const StrategyVector& optimal,
                       double delta_p);

// Population standard deviation of the 18 probabilities; the score-selectivity
// of a strategy.
double optimal_contrast(const StrategyVector& strategy);

// Coordinate-wise mean of per-player optimal strategies.
StrategyVector category_pattern(const std::vector<StrategyVector>& optima);

}  // namespace tennis::metrics
