#include "persim/zot.hpp"

#include <algorithm>

namespace persim::zot {

bool ZotProfile::valid() const noexcept {
  if (!(demand_mbps >= 0.0)) return false;
  if (adequate_mbps.front() != 0.0) return false;
  if (!std::is_sorted(adequate_mbps.begin(), adequate_mbps.end())) return false;
  return adequate_mbps.back() <= demand_mbps;
}

SatisfactionLevel satisfaction_of(const ZotProfile& p, double qos_p_mbps) noexcept {
  // Count thresholds at or below qos_p. The bottom threshold is zero, so the
  // count is at least 1 for any non-negative rate.
  auto it = std::upper_bound(p.adequate_mbps.begin(), p.adequate_mbps.end(), qos_p_mbps);
  int level = static_cast<int>(it - p.adequate_mbps.begin());
  return SatisfactionLevel{std::max(level, 1)};
}

std::pair<double, double> zot_bounds(const ZotProfile& p, SatisfactionLevel level) noexcept {
  int i = std::clamp(level.value, 1, kLevels);
  double lo = p.adequate_mbps[static_cast<std::size_t>(i) - 1];
  double hi = (i == kLevels) ? p.demand_mbps : p.adequate_mbps[static_cast<std::size_t>(i)];
  return {lo, hi};
}

double delta_of(const ZotProfile& p, double qos_p_mbps) noexcept {
  return std::max(p.demand_mbps - qos_p_mbps, 0.0);
}

double min_qos_for(const ZotProfile& p, SatisfactionLevel target) noexcept {
  int i = std::clamp(target.value, 1, kLevels);
  return p.adequate_mbps[static_cast<std::size_t>(i) - 1];
}

}  // namespace persim::zot
