#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tennis/category.hpp"
#include "tennis/opt/frontier.hpp"
#include "tennis/opt/nsga2.hpp"

namespace tennis::opt {

// The constrained search problem for one player: maximize game-winning
// probability and minimize expected points per game over strategies inside
// the category box, keeping the average point-winning probability within
// +/- epsilon of target_avg. Evaluation runs through the batched game kernel.
Problem make_game_problem(double target_avg, const CategoryConfig& config);

// One optimizer run. Returns the feasible first front of the final
// population: each point carries its strategy, outcome, a zero violation and
// the seed. An infeasible search yields an empty list, not an error.
// Deterministic given (target_avg, config, seed).
std::vector<FrontierPoint> nsga2_optimize(double target_avg, const CategoryConfig& config,
                                          std::uint64_t seed);

// Independent seeded runs merged into one unified frontier.
Frontier seeded_union(double target_avg, const CategoryConfig& config,
                      std::span<const std::uint64_t> seeds);

}  // namespace tennis::opt
