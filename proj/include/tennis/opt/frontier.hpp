#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "tennis/strategy.hpp"

namespace tennis::opt {

// Outcome of a strategy: game-winning probability (maximized) and expected
// points per game (minimized).
struct OutcomePair {
  double win = 0.0;
  double points = 0.0;
};

// True iff a is at least as good as b on both objectives and strictly better
// on at least one.
bool dominates(const OutcomePair& a, const OutcomePair& b);

// Internal objective space: both coordinates minimized.
struct Obj2 {
  double f1 = 0.0;
  double f2 = 0.0;
};

inline Obj2 to_objectives(const OutcomePair& o) { return {-o.win, o.points}; }
inline OutcomePair to_outcome(const Obj2& f) { return {-f.f1, f.f2}; }

bool dominates_min(const Obj2& a, const Obj2& b);

// Partition into fronts F1, F2, ...: every member of Fk is non-dominated
// within Fk and the later fronts. Front members keep input order.
template <class Dom>
std::vector<std::vector<int>> fronts_by(std::size_t n, Dom&& dom) {
  std::vector<std::vector<int>> dominated(n);
  std::vector<int> dominators(n, 0);
  std::vector<std::vector<int>> fronts;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int a = static_cast<int>(i);
      const int b = static_cast<int>(j);
      if (dom(a, b)) {
        dominated[i].push_back(b);
        ++dominators[j];
      } else if (dom(b, a)) {
        dominated[j].push_back(a);
        ++dominators[i];
      }
    }
  }
  std::vector<int> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (dominators[i] == 0) current.push_back(static_cast<int>(i));
  }
  while (!current.empty()) {
    fronts.push_back(current);
    std::vector<int> next;
    for (int i : current) {
      for (int j : dominated[static_cast<std::size_t>(i)]) {
        if (--dominators[static_cast<std::size_t>(j)] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    current = std::move(next);
  }
  return fronts;
}

std::vector<std::vector<int>> nondominated_fronts(std::span<const Obj2> objectives);

// Crowding distance within one mutually non-dominated front. Boundary points
// per objective get infinity; interior points sum the normalized neighbor
// gaps; an objective with zero range contributes nothing.
std::vector<double> crowding_distance(std::span<const Obj2> front);

// Area dominated by the point set with respect to a reference corner (both
// objectives minimized; points at or beyond the reference contribute 0).
double hypervolume(std::span<const Obj2> points, Obj2 reference);

struct FrontierPoint {
  StrategyVector strategy;
  OutcomePair outcome;
  double constraint_violation = 0.0;
  std::uint64_t seed = 0;  // provenance: the run that produced this point
};

// Non-dominated set sorted by ascending win probability; expected points are
// then strictly increasing.
struct Frontier {
  std::vector<FrontierPoint> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

// Union of several runs: deduplicate outcomes (1e-9 on both coordinates),
// drop dominated points, sort ascending by win probability.
Frontier merge_frontiers(const std::vector<std::vector<FrontierPoint>>& runs);

}  // namespace tennis::opt
