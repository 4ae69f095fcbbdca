#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "tennis/errors.hpp"

namespace tennis {

// A game score from the analyzed player's perspective. There are 18 transient
// states and two absorbing ones (game won / game lost). The canonical index
// order below is fixed and shared by every file format:
//
//   0 (0-0)   1 (1-0)   2 (0-1)   3 (2-0)   4 (1-1)   5 (0-2)
//   6 (3-0)   7 (2-1)   8 (1-2)   9 (0-3)  10 (3-1)  11 (2-2)
//  12 (1-3)  13 (3-2)  14 (2-3)  15 (3-3)  16 (AD-3) 17 (3-AD)
//  18 Won    19 Lost
//
// Point coordinates use 0..3 plus 4 for advantage; (4,3) is the player's
// advantage, (3,4) the opponent's. Scores past deuce collapse onto the
// (3,3)/(AD,3)/(3,AD) cycle.
class ScoreState {
 public:
  static constexpr int kTransientCount = 18;
  static constexpr int kWonIndex = 18;
  static constexpr int kLostIndex = 19;
  static constexpr int kAdvantage = 4;

  constexpr ScoreState() : idx_(0) {}

  static constexpr ScoreState from_index(int index) {
    if (index < 0 || index > kLostIndex) throw ContractViolation("score state index out of range");
    return ScoreState(static_cast<std::uint8_t>(index));
  }

  // Points for the analyzed player and the opponent; 4 encodes advantage and
  // may only pair with 3.
  static constexpr ScoreState from_points(int mine, int theirs) {
    for (int i = 0; i < kTransientCount; ++i) {
      if (kCoords[i][0] == mine && kCoords[i][1] == theirs) {
        return ScoreState(static_cast<std::uint8_t>(i));
      }
    }
    throw ContractViolation("no such transient score state");
  }

  static constexpr ScoreState initial() { return ScoreState(0); }
  static constexpr ScoreState won() { return ScoreState(kWonIndex); }
  static constexpr ScoreState lost() { return ScoreState(kLostIndex); }

  constexpr int index() const { return idx_; }
  constexpr bool transient() const { return idx_ < kTransientCount; }
  constexpr bool absorbing() const { return !transient(); }
  constexpr bool is_won() const { return idx_ == kWonIndex; }
  constexpr bool is_lost() const { return idx_ == kLostIndex; }

  // Player / opponent points (4 = advantage). Only valid for transient states.
  constexpr int player_points() const { return kCoords[require_transient()][0]; }
  constexpr int opponent_points() const { return kCoords[require_transient()][1]; }

  // Successor state after the analyzed player wins (or loses) the next point.
  constexpr ScoreState next(bool won_point) const {
    const int i = require_transient();
    const int a = kCoords[i][0];
    const int b = kCoords[i][1];
    if (won_point) {
      if (a == kAdvantage) return won();
      if (b == kAdvantage) return from_points(3, 3);
      if (a == 3 && b == 3) return from_points(kAdvantage, 3);
      if (a == 3) return won();
      return from_points(a + 1, b);
    }
    if (b == kAdvantage) return lost();
    if (a == kAdvantage) return from_points(3, 3);
    if (a == 3 && b == 3) return from_points(3, kAdvantage);
    if (b == 3) return lost();
    return from_points(a, b + 1);
  }

  // The same score seen from the opponent's side; Won and Lost swap.
  constexpr ScoreState mirrored() const {
    if (is_won()) return lost();
    if (is_lost()) return won();
    return from_points(kCoords[idx_][1], kCoords[idx_][0]);
  }

  constexpr std::string_view label() const { return kLabels[idx_]; }

  friend constexpr bool operator==(ScoreState a, ScoreState b) { return a.idx_ == b.idx_; }
  friend constexpr bool operator!=(ScoreState a, ScoreState b) { return a.idx_ != b.idx_; }

  static constexpr std::array<ScoreState, kTransientCount> transient_states() {
    std::array<ScoreState, kTransientCount> out{};
    for (int i = 0; i < kTransientCount; ++i) out[i] = ScoreState(static_cast<std::uint8_t>(i));
    return out;
  }

 private:
  constexpr explicit ScoreState(std::uint8_t idx) : idx_(idx) {}

  constexpr int require_transient() const {
    if (!transient()) throw ContractViolation("operation requires a transient score state");
    return idx_;
  }

  static constexpr std::array<std::array<int, 2>, kTransientCount> kCoords = {{
      {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2},
      {0, 3}, {3, 1}, {2, 2}, {1, 3}, {3, 2}, {2, 3}, {3, 3}, {4, 3}, {3, 4},
  }};

  static constexpr std::array<std::string_view, 20> kLabels = {
      "0-0", "1-0", "0-1", "2-0", "1-1", "0-2", "3-0", "2-1", "1-2", "0-3",
      "3-1", "2-2", "1-3", "3-2", "2-3", "3-3", "AD-3", "3-AD", "won", "lost",
  };

  std::uint8_t idx_;
};

inline constexpr ScoreState transition_from(ScoreState state, bool won_point) {
  return state.next(won_point);
}

// Version tag for the canonical state order; embedded in every artifact.
inline constexpr std::string_view kStateOrderVersion = "score-order-v1";

}  // namespace tennis
