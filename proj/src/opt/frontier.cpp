#include "tennis/opt/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tennis::opt {

bool dominates(const OutcomePair& a, const OutcomePair& b) {
  return a.win >= b.win && a.points <= b.points && (a.win > b.win || a.points < b.points);
}

bool dominates_min(const Obj2& a, const Obj2& b) {
  return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

// Staircase ranking, O(n log n) for two minimized objectives: walk the points
// in (f1, f2) order and binary-search the per-front minimum-f2 ladder. Exact
// duplicates share a front. Produces the same canonical partition (and the
// same ascending order inside each front) as the generic fronts_by.
std::vector<std::vector<int>> nondominated_fronts(std::span<const Obj2> objectives) {
  const std::size_t n = objectives.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Obj2& oa = objectives[static_cast<std::size_t>(a)];
    const Obj2& ob = objectives[static_cast<std::size_t>(b)];
    if (oa.f1 != ob.f1) return oa.f1 < ob.f1;
    if (oa.f2 != ob.f2) return oa.f2 < ob.f2;
    return a < b;
  });

  std::vector<std::size_t> front_of(n, 0);
  std::vector<double> ladder;  // minimum f2 per front, strictly ascending
  std::size_t i = 0;
  while (i < n) {
    const Obj2& o = objectives[static_cast<std::size_t>(order[i])];
    std::size_t j = i;
    while (j < n) {
      const Obj2& oj = objectives[static_cast<std::size_t>(order[j])];
      if (oj.f1 != o.f1 || oj.f2 != o.f2) break;
      ++j;
    }
    // Fronts whose minimum f2 is <= o.f2 all dominate this group: their
    // witness point has f1 <= o.f1 and is not the group itself.
    const auto it = std::upper_bound(ladder.begin(), ladder.end(), o.f2);
    const auto front = static_cast<std::size_t>(it - ladder.begin());
    if (front == ladder.size()) {
      ladder.push_back(o.f2);
    } else {
      ladder[front] = o.f2;
    }
    for (; i < j; ++i) front_of[static_cast<std::size_t>(order[i])] = front;
  }

  std::vector<std::vector<int>> fronts(ladder.size());
  for (std::size_t idx = 0; idx < n; ++idx) {
    fronts[front_of[idx]].push_back(static_cast<int>(idx));
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Obj2> front) {
  const std::size_t n = front.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  std::vector<int> order(n);
  for (auto axis : {0, 1}) {
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    auto value = [&](int i) {
      const Obj2& o = front[static_cast<std::size_t>(i)];
      return axis == 0 ? o.f1 : o.f2;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return value(a) < value(b); });
    const double lo = value(order.front());
    const double hi = value(order.back());
    dist[static_cast<std::size_t>(order.front())] = inf;
    dist[static_cast<std::size_t>(order.back())] = inf;
    if (hi - lo <= 0.0) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const std::size_t idx = static_cast<std::size_t>(order[k]);
      if (dist[idx] == inf) continue;
      dist[idx] += (value(order[k + 1]) - value(order[k - 1])) / (hi - lo);
    }
  }
  return dist;
}

double hypervolume(std::span<const Obj2> points, Obj2 reference) {
  std::vector<Obj2> pts;
  pts.reserve(points.size());
  for (const Obj2& p : points) {
    if (p.f1 < reference.f1 && p.f2 < reference.f2) pts.push_back(p);
  }
  if (pts.empty()) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Obj2& a, const Obj2& b) {
    return a.f1 < b.f1 || (a.f1 == b.f1 && a.f2 < b.f2);
  });
  // Staircase sweep over the non-dominated subset.
  double area = 0.0;
  double best_f2 = std::numeric_limits<double>::infinity();
  std::vector<Obj2> stair;
  for (const Obj2& p : pts) {
    if (p.f2 < best_f2) {
      stair.push_back(p);
      best_f2 = p.f2;
    }
  }
  for (std::size_t i = 0; i < stair.size(); ++i) {
    const double right = (i + 1 < stair.size()) ? stair[i + 1].f1 : reference.f1;
    area += (right - stair[i].f1) * (reference.f2 - stair[i].f2);
  }
  return area;
}

Frontier merge_frontiers(const std::vector<std::vector<FrontierPoint>>& runs) {
  std::vector<FrontierPoint> all;
  for (const auto& run : runs) all.insert(all.end(), run.begin(), run.end());

  // Ascending win; descending points among equal wins, so the reverse sweep
  // below meets the dominating member of an equal-win group first.
  std::stable_sort(all.begin(), all.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    if (a.outcome.win != b.outcome.win) return a.outcome.win < b.outcome.win;
    if (a.outcome.points != b.outcome.points) return a.outcome.points > b.outcome.points;
    return a.seed < b.seed;
  });

  // Deduplicate near-identical outcome pairs, keeping the first (lowest seed).
  std::vector<FrontierPoint> unique;
  for (const FrontierPoint& p : all) {
    if (!unique.empty() && std::fabs(unique.back().outcome.win - p.outcome.win) <= 1e-9 &&
        std::fabs(unique.back().outcome.points - p.outcome.points) <= 1e-9) {
      continue;
    }
    unique.push_back(p);
  }

  // Sweep from the highest win probability down; keep points whose expected
  // points strictly undercut everything seen so far.
  Frontier frontier;
  double best_points = std::numeric_limits<double>::infinity();
  for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
    if (it->outcome.points < best_points) {
      frontier.points.push_back(*it);
      best_points = it->outcome.points;
    }
  }
  std::reverse(frontier.points.begin(), frontier.points.end());
  return frontier;
}

}  // namespace tennis::opt
