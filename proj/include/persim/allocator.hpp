#pragma once

#include <span>
#include <vector>

#include "persim/zot.hpp"

namespace persim::alloc {

enum class PolicyKind { personalized, baseline };

// How the planner treats predicted tolerance.
struct PlanningPolicy {
  PolicyKind kind = PolicyKind::personalized;
  zot::SatisfactionLevel s_min{4};
};

// Per-slot need of one user.
struct UserTarget {
  double target_mbps = 0.0;
  double demand_mbps = 0.0;
};

// Per-user outcome of one slot's assignment.
struct Decision {
  double target_mbps = 0.0;
  double demand_mbps = 0.0;
  double achieved_mbps = 0.0;  // sum of assigned RB rates, not capped at demand
  std::vector<int> rbs;        // assigned RB indices, ascending
  bool feasible = false;       // achieved covers the target

  friend bool operator==(const Decision&, const Decision&) = default;
};

// Instantaneous rate of every (user, RB) pair.
struct RateTable {
  int num_users = 0;
  int num_rbs = 0;
  std::vector<double> rate_mbps;  // user-major

  double at(int user, int rb) const noexcept {
    return rate_mbps[static_cast<std::size_t>(user) * static_cast<std::size_t>(num_rbs) +
                     static_cast<std::size_t>(rb)];
  }
};

// Rate the network can withhold while still reaching s_min on the predicted
// profile: demand minus the s_min threshold. Never negative.
double optimize_delta(const zot::ZotProfile& predicted, zot::SatisfactionLevel s_min) noexcept;

// Slot rate target: full demand for the baseline policy, demand minus the
// optimized gap for the personalized one.
double target_rate(const PlanningPolicy&, const zot::ZotProfile& predicted,
                   double demand_mbps) noexcept;

// Deficit-driven greedy assignment: the user with the largest remaining
// deficit (ties: lower user id) repeatedly takes its highest-rate unassigned
// RB (ties: lower RB index) until all deficits close or RBs run out. A user
// whose best remaining RB rate is zero is set aside so it cannot hoard the
// pool. Users with met (or zero) targets receive nothing.
std::vector<Decision> allocate_rbs(std::span<const UserTarget>, const RateTable&);

// Exhaustive reference: scans every assignment of RBs to users (or none).
// Prefers meeting all targets with the fewest RBs, ties broken toward the
// lexicographically smallest assignment vector; if no assignment meets all
// targets it maximizes total capped coverage, then uses fewer RBs. Throws
// std::invalid_argument when the state space exceeds 4^10.
std::vector<Decision> allocate_rbs_exhaustive(std::span<const UserTarget>, const RateTable&);

}  // namespace persim::alloc
