#include "persim/allocator.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace persim::alloc {
namespace {

// Slack below which a target counts as met. Shared by both allocators so
// their feasibility verdicts agree on borderline sums.
constexpr double kFeasEps = 1e-9;

// 4^10: the largest state space the exhaustive scan will walk.
constexpr std::uint64_t kMaxStates = 1048576;

void check_inputs(std::span<const UserTarget> users, const RateTable& rates) {
  if (rates.num_users < 0 || rates.num_rbs < 0)
    throw std::invalid_argument("rate table dimensions must be non-negative");
  if (static_cast<std::size_t>(rates.num_users) != users.size())
    throw std::invalid_argument("rate table rows do not match user count");
  const auto want = static_cast<std::size_t>(rates.num_users) *
                    static_cast<std::size_t>(rates.num_rbs);
  if (rates.rate_mbps.size() != want)
    throw std::invalid_argument("rate table has " + std::to_string(rates.rate_mbps.size()) +
                                " entries, expected " + std::to_string(want));
  for (double r : rates.rate_mbps)
    if (!(r >= 0.0)) throw std::invalid_argument("RB rates must be non-negative");
  for (const auto& u : users)
    if (!(u.target_mbps >= 0.0) || !(u.demand_mbps >= 0.0))
      throw std::invalid_argument("targets and demands must be non-negative");
}

std::vector<Decision> seed_decisions(std::span<const UserTarget> users) {
  std::vector<Decision> out(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    out[i].target_mbps = users[i].target_mbps;
    out[i].demand_mbps = users[i].demand_mbps;
  }
  return out;
}

}  // namespace

double optimize_delta(const zot::ZotProfile& predicted, zot::SatisfactionLevel s_min) noexcept {
  const double needed = zot::min_qos_for(predicted, s_min);
  return std::max(predicted.demand_mbps - needed, 0.0);
}

double target_rate(const PlanningPolicy& policy, const zot::ZotProfile& predicted,
                   double demand_mbps) noexcept {
  if (policy.kind == PolicyKind::baseline) return demand_mbps;
  return std::max(demand_mbps - optimize_delta(predicted, policy.s_min), 0.0);
}

std::vector<Decision> allocate_rbs(std::span<const UserTarget> users, const RateTable& rates) {
  check_inputs(users, rates);
  const int n = rates.num_users;
  const int num_rbs = rates.num_rbs;

  auto decisions = seed_decisions(users);
  std::vector<double> deficit(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) deficit[i] = users[i].target_mbps;
  std::vector<char> rb_taken(static_cast<std::size_t>(num_rbs), 0);
  std::vector<char> parked(users.size(), 0);  // best remaining rate was zero
  int rbs_left = num_rbs;

  while (rbs_left > 0) {
    int user = -1;
    double worst = kFeasEps;
    for (int u = 0; u < n; ++u) {
      if (parked[static_cast<std::size_t>(u)]) continue;
      if (deficit[static_cast<std::size_t>(u)] > worst) {
        worst = deficit[static_cast<std::size_t>(u)];
        user = u;
      }
    }
    if (user < 0) break;

    int rb = -1;
    double best = -1.0;
    for (int r = 0; r < num_rbs; ++r) {
      if (rb_taken[static_cast<std::size_t>(r)]) continue;
      const double rate = rates.at(user, r);
      if (rate > best) {
        best = rate;
        rb = r;
      }
    }
    if (rb < 0) break;
    if (best <= 0.0) {
      parked[static_cast<std::size_t>(user)] = 1;
      continue;
    }

    rb_taken[static_cast<std::size_t>(rb)] = 1;
    --rbs_left;
    deficit[static_cast<std::size_t>(user)] -= best;
    auto& d = decisions[static_cast<std::size_t>(user)];
    d.achieved_mbps += best;
    d.rbs.push_back(rb);
  }

  for (std::size_t i = 0; i < decisions.size(); ++i) {
    std::sort(decisions[i].rbs.begin(), decisions[i].rbs.end());
    decisions[i].feasible = deficit[i] <= kFeasEps;
  }
  return decisions;
}

std::vector<Decision> allocate_rbs_exhaustive(std::span<const UserTarget> users,
                                              const RateTable& rates) {
  check_inputs(users, rates);
  const int n = rates.num_users;
  const int num_rbs = rates.num_rbs;

  std::uint64_t states = 1;
  for (int r = 0; r < num_rbs; ++r) {
    states *= static_cast<std::uint64_t>(n) + 1;
    if (states > kMaxStates)
      throw std::invalid_argument("assignment space exceeds 4^10 states");
  }

  // Digit r of the odometer is RB r's owner (0 = unassigned, u+1 = user u).
  // Incrementing the last digit first walks assignments in lexicographic
  // order with digit 0 most significant, and only strictly better states
  // displace the incumbent, so ties resolve to the lex-smallest vector.
  std::vector<int> assign(static_cast<std::size_t>(num_rbs), 0);
  std::vector<double> achieved(users.size());

  bool have_feasible = false;
  int best_used = std::numeric_limits<int>::max();
  double best_coverage = -1.0;
  std::vector<int> best_assign(static_cast<std::size_t>(num_rbs), 0);
  bool have_any = false;

  for (std::uint64_t s = 0;; ++s) {
    std::fill(achieved.begin(), achieved.end(), 0.0);
    int used = 0;
    for (int r = 0; r < num_rbs; ++r) {
      const int owner = assign[static_cast<std::size_t>(r)];
      if (owner > 0) {
        ++used;
        achieved[static_cast<std::size_t>(owner - 1)] += rates.at(owner - 1, r);
      }
    }
    bool feasible = true;
    double coverage = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      if (achieved[i] < users[i].target_mbps - kFeasEps) feasible = false;
      coverage += std::min(achieved[i], users[i].target_mbps);
    }

    bool better;
    if (!have_any) {
      better = true;
    } else if (feasible != have_feasible) {
      better = feasible;
    } else if (feasible) {
      better = used < best_used;
    } else {
      better = coverage > best_coverage + kFeasEps ||
               (coverage > best_coverage - kFeasEps && used < best_used);
    }
    if (better) {
      have_any = true;
      have_feasible = feasible;
      best_used = used;
      best_coverage = coverage;
      best_assign = assign;
    }

    if (s + 1 == states) break;
    for (int r = num_rbs - 1; r >= 0; --r) {
      auto& digit = assign[static_cast<std::size_t>(r)];
      if (++digit <= n) break;
      digit = 0;
    }
  }

  auto decisions = seed_decisions(users);
  for (int r = 0; r < num_rbs; ++r) {
    const int owner = best_assign[static_cast<std::size_t>(r)];
    if (owner > 0) {
      auto& d = decisions[static_cast<std::size_t>(owner - 1)];
      d.achieved_mbps += rates.at(owner - 1, r);
      d.rbs.push_back(r);
    }
  }
  for (std::size_t i = 0; i < decisions.size(); ++i)
    decisions[i].feasible = decisions[i].achieved_mbps >= users[i].target_mbps - kFeasEps;
  return decisions;
}

}  // namespace persim::alloc
