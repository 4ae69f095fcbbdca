#include "tennis/game_chain.hpp"

#include <cmath>
#include <string>

#include "tennis/errors.hpp"

namespace tennis {

namespace {

constexpr int kN = ScoreState::kTransientCount;

}  // namespace

GameOutcome solve_chain(const StrategyVector& strategy) {
  if (!strategy.valid()) {
    throw ContractViolation("strategy probabilities must lie in [0,1]");
  }

  // A = (I - Q)^T, so row r holds the inflow structure of state r:
  // A[r][c] = delta(r,c) - P(c -> r).
  std::array<double, kN * kN> a{};
  std::array<double, kN> v{};
  for (int c = 0; c < kN; ++c) {
    a[static_cast<std::size_t>(c * kN + c)] = 1.0;
    const ScoreState s = ScoreState::from_index(c);
    const double p = strategy[c];
    const ScoreState on_win = s.next(true);
    const ScoreState on_loss = s.next(false);
    if (on_win.transient()) a[static_cast<std::size_t>(on_win.index() * kN + c)] -= p;
    if (on_loss.transient()) a[static_cast<std::size_t>(on_loss.index() * kN + c)] -= 1.0 - p;
  }
  v[0] = 1.0;

  // Partial-pivoting Gaussian elimination, in place.
  std::array<int, kN> row{};
  for (int i = 0; i < kN; ++i) row[static_cast<std::size_t>(i)] = i;
  for (int k = 0; k < kN; ++k) {
    int pivot = k;
    double best = std::fabs(a[static_cast<std::size_t>(row[static_cast<std::size_t>(k)] * kN + k)]);
    for (int r = k + 1; r < kN; ++r) {
      const double m = std::fabs(a[static_cast<std::size_t>(row[static_cast<std::size_t>(r)] * kN + k)]);
      if (m > best) {
        best = m;
        pivot = r;
      }
    }
    std::swap(row[static_cast<std::size_t>(k)], row[static_cast<std::size_t>(pivot)]);
    std::swap(v[static_cast<std::size_t>(k)], v[static_cast<std::size_t>(pivot)]);
    const double d = a[static_cast<std::size_t>(row[static_cast<std::size_t>(k)] * kN + k)];
    for (int r = k + 1; r < kN; ++r) {
      const double* pk = &a[static_cast<std::size_t>(row[static_cast<std::size_t>(k)] * kN)];
      double* pr = &a[static_cast<std::size_t>(row[static_cast<std::size_t>(r)] * kN)];
      const double f = pr[k] / d;
      if (f == 0.0) continue;
      for (int c = k; c < kN; ++c) pr[c] -= f * pk[c];
      v[static_cast<std::size_t>(r)] -= f * v[static_cast<std::size_t>(k)];
    }
  }
  for (int k = kN - 1; k >= 0; --k) {
    const double* pk = &a[static_cast<std::size_t>(row[static_cast<std::size_t>(k)] * kN)];
    double s = v[static_cast<std::size_t>(k)];
    for (int c = k + 1; c < kN; ++c) s -= pk[c] * v[static_cast<std::size_t>(c)];
    v[static_cast<std::size_t>(k)] = s / pk[k];
  }

  GameOutcome out;
  double win = 0.0;
  double loss = 0.0;
  double points = 0.0;
  for (int c = 0; c < kN; ++c) {
    const ScoreState s = ScoreState::from_index(c);
    const double p = strategy[c];
    const double visits = v[static_cast<std::size_t>(c)];
    if (s.next(true).is_won()) win += visits * p;
    if (s.next(false).is_lost()) loss += visits * (1.0 - p);
    points += visits;
    out.visit_counts[static_cast<std::size_t>(c)] = visits;
  }
  out.win_probability = win;
  out.loss_probability = loss;
  out.expected_points = points;

  const double mass = win + loss;
  if (!std::isfinite(mass) || std::fabs(mass - 1.0) > 1e-9) {
    throw NonAbsorbingError("absorption mass " + std::to_string(mass) + " differs from 1");
  }
  return out;
}

double induced_average_pwp(const StrategyVector& strategy, const GameOutcome& outcome) {
  double weighted = 0.0;
  double total = 0.0;
  for (int i = 0; i < kN; ++i) {
    weighted += outcome.visit_counts[static_cast<std::size_t>(i)] * strategy[i];
    total += outcome.visit_counts[static_cast<std::size_t>(i)];
  }
  return weighted / total;
}

double induced_average_pwp(const StrategyVector& strategy) {
  return induced_average_pwp(strategy, solve_chain(strategy));
}

}  // namespace tennis
