#include "tennis/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tennis/errors.hpp"

namespace tennis::metrics {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

double axis_norm(double value, double lo, double hi) {
  if (hi - lo <= 0.0) return 0.5;
  return (value - lo) / (hi - lo);
}

double sq(double x) { return x * x; }

double point_sq_dist(const Norm2& a, const Norm2& b) { return sq(a.u - b.u) + sq(a.v - b.v); }

double segment_sq_dist(const Norm2& p, const Norm2& a, const Norm2& b) {
  const double du = b.u - a.u;
  const double dv = b.v - a.v;
  const double len_sq = du * du + dv * dv;
  if (len_sq <= 0.0) return point_sq_dist(p, a);
  double t = ((p.u - a.u) * du + (p.v - a.v) * dv) / len_sq;
  t = std::clamp(t, 0.0, 1.0);
  return sq(p.u - (a.u + t * du)) + sq(p.v - (a.v + t * dv));
}

}  // namespace

NormBounds normalization_bounds(const opt::Frontier& frontier, const opt::OutcomePair& observed) {
  if (frontier.empty()) throw ContractViolation("normalization requires a non-empty frontier");
  NormBounds b{observed.win, observed.win, observed.points, observed.points};
  for (const auto& p : frontier.points) {
    b.win_lo = std::min(b.win_lo, p.outcome.win);
    b.win_hi = std::max(b.win_hi, p.outcome.win);
    b.pts_lo = std::min(b.pts_lo, p.outcome.points);
    b.pts_hi = std::max(b.pts_hi, p.outcome.points);
  }
  return b;
}

Norm2 normalize(const opt::OutcomePair& outcome, const NormBounds& bounds) {
  return {axis_norm(outcome.win, bounds.win_lo, bounds.win_hi),
          axis_norm(outcome.points, bounds.pts_lo, bounds.pts_hi)};
}

EfficiencyResult efficiency_score(const opt::OutcomePair& observed, const opt::Frontier& frontier,
                                  DistanceMode mode) {
  if (frontier.empty()) throw ContractViolation("efficiency requires a non-empty frontier");
  const NormBounds bounds = normalization_bounds(frontier, observed);
  const Norm2 obs = normalize(observed, bounds);

  std::vector<Norm2> pts;
  pts.reserve(frontier.size());
  for (const auto& p : frontier.points) pts.push_back(normalize(p.outcome, bounds));
  // The polyline is defined over the sorted outcomes, whatever order the
  // points arrived in.
  std::sort(pts.begin(), pts.end(), [](const Norm2& a, const Norm2& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });

  double best = std::numeric_limits<double>::infinity();
  EfficiencyResult result;
  if (pts.size() == 1 || mode == DistanceMode::PointSet) {
    for (const Norm2& p : pts) best = std::min(best, point_sq_dist(obs, p));
    result.degenerate_frontier = pts.size() == 1;
  } else {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      best = std::min(best, segment_sq_dist(obs, pts[i], pts[i + 1]));
    }
  }
  result.distance = std::sqrt(best);
  result.efficiency = 1.0 - result.distance / kSqrt2;
  return result;
}

int closest_optimal_index(const opt::OutcomePair& observed, const opt::Frontier& frontier) {
  if (frontier.empty()) throw ContractViolation("closest optimum requires a non-empty frontier");
  const NormBounds bounds = normalization_bounds(frontier, observed);
  const Norm2 obs = normalize(observed, bounds);
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const double d = point_sq_dist(obs, normalize(frontier.points[i].outcome, bounds));
    const bool wins_tie =
        d == best_dist && best >= 0 &&
        frontier.points[i].outcome.win >
            frontier.points[static_cast<std::size_t>(best)].outcome.win;
    if (d < best_dist || wins_tie) {
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

const StrategyVector& closest_optimal_strategy(const opt::OutcomePair& observed,
                                               const opt::Frontier& frontier) {
  return frontier.points[static_cast<std::size_t>(closest_optimal_index(observed, frontier))]
      .strategy;
}

FitResult strategy_fit(const StrategyVector& observed, const StrategyVector& optimal,
                       double delta_p) {
  if (delta_p <= 0.0) throw ContractViolation("delta_p must be positive");
  double dist_sq = 0.0;
  for (int i = 0; i < ScoreState::kTransientCount; ++i) {
    dist_sq += sq(observed[i] - optimal[i]);
  }
  FitResult result;
  result.distance = std::sqrt(dist_sq);
  const double max_dist = std::sqrt(18.0) * delta_p;
  const double raw = 1.0 - result.distance / max_dist;
  result.fit = std::clamp(raw, 0.0, 1.0);
  result.clamped = raw != result.fit;
  return result;
}

double optimal_contrast(const StrategyVector& strategy) {
  const double mean = strategy.mean();
  double var = 0.0;
  for (double p : strategy.p) var += sq(p - mean);
  return std::sqrt(var / 18.0);
}

StrategyVector category_pattern(const std::vector<StrategyVector>& optima) {
  if (optima.empty()) throw ContractViolation("category pattern requires at least one strategy");
  StrategyVector mean = StrategyVector::constant(0.0);
  for (const auto& s : optima) {
    for (int i = 0; i < ScoreState::kTransientCount; ++i) mean[i] += s[i];
  }
  for (int i = 0; i < ScoreState::kTransientCount; ++i) {
    mean[i] /= static_cast<double>(optima.size());
  }
  return mean;
}

}  // namespace tennis::metrics
