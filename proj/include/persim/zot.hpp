#pragma once

#include <array>
#include <compare>
#include <utility>

namespace persim::zot {

inline constexpr int kLevels = 5;

// Discrete satisfaction score on the 1..5 scale.
struct SatisfactionLevel {
  int value = 1;

  constexpr bool valid() const noexcept { return value >= 1 && value <= kLevels; }
  friend constexpr auto operator<=>(SatisfactionLevel, SatisfactionLevel) = default;
};

// A user's tolerance profile in one context: the demanded rate plus the five
// adequate thresholds bounding the satisfaction zones. adequate_mbps must be
// non-decreasing, start at exactly zero, and end at or below demand_mbps.
struct ZotProfile {
  double demand_mbps = 0.0;
  std::array<double, kLevels> adequate_mbps{};

  bool valid() const noexcept;
};

// Largest level whose adequate threshold is met by qos_p. Total for any
// qos_p >= 0 (the bottom threshold is zero); rates above demand still score 5.
SatisfactionLevel satisfaction_of(const ZotProfile&, double qos_p_mbps) noexcept;

// The rate interval scoring exactly `level`: [q_ai, q_a(i+1)) below the top
// and [q_a5, demand] at the top. Across levels 1..5 the intervals tile
// [0, demand]. Out-of-range levels are clamped.
std::pair<double, double> zot_bounds(const ZotProfile&, SatisfactionLevel level) noexcept;

// Gap between demanded and provided rate, clamped below at zero.
double delta_of(const ZotProfile&, double qos_p_mbps) noexcept;

// Smallest provided rate that reaches `target`.
double min_qos_for(const ZotProfile&, SatisfactionLevel target) noexcept;

}  // namespace persim::zot
