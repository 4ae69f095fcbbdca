#pragma once

#include <array>
#include <cmath>

#include "tennis/score_state.hpp"

namespace tennis {

// A score-dependent strategy: one point-winning probability per transient
// state, in canonical state order.
struct StrategyVector {
  std::array<double, ScoreState::kTransientCount> p{};

  static StrategyVector constant(double value) {
    StrategyVector s;
    s.p.fill(value);
    return s;
  }

  double operator[](int i) const { return p[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return p[static_cast<std::size_t>(i)]; }
  double at(ScoreState s) const { return p[static_cast<std::size_t>(s.index())]; }

  bool valid() const {
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) return false;
    }
    return true;
  }

  bool within(double lo, double hi) const {
    for (double v : p) {
      if (v < lo || v > hi) return false;
    }
    return true;
  }

  double mean() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s / static_cast<double>(p.size());
  }

  // The mirrored strategy: probabilities of the opponent winning each point,
  // indexed from the opponent's perspective.
  StrategyVector mirrored() const {
    StrategyVector out;
    for (int i = 0; i < ScoreState::kTransientCount; ++i) {
      const int j = ScoreState::from_index(i).mirrored().index();
      out.p[static_cast<std::size_t>(j)] = 1.0 - p[static_cast<std::size_t>(i)];
    }
    return out;
  }

  friend bool operator==(const StrategyVector& a, const StrategyVector& b) { return a.p == b.p; }
};

}  // namespace tennis
