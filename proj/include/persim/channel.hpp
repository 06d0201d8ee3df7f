#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "persim/rng.hpp"

namespace persim::phy {

// Physical-layer parameters of the single serving cell. Coverage is a square
// of half-width cell_radius_m centred on the eNB at the origin, tiled into
// grid_k x grid_k equal cells for mobility and shadowing.
struct CellConfig {
  int num_enb = 1;  // the model is single-cell; validate() rejects anything else
  std::string fading_model = "rayleigh";  // the only implemented small-scale model
  int num_rbs = 9;
  int subcarriers_per_rb = 12;    // informational; RB bandwidth is given directly
  double rb_bandwidth_hz = 180e3;
  double carrier_freq_ghz = 2.0;  // informational; the loss model is distance-only
  double path_loss_intercept_db = 35.3;
  double path_loss_slope_db = 37.6;  // per decade of distance in metres
  double shadowing_std_db = 8.0;
  double noise_figure_db = 9.0;
  double noise_density_dbm_hz = -174.0;
  int grid_k = 100;
  double cell_radius_m = 500.0;
  double enb_tx_power_dbm = 46.0;  // total power, split evenly across RBs
  double min_distance_m = 1.0;
  double se_cap_bps_hz = 7.4;  // per-RB spectral-efficiency ceiling

  double cell_side_m() const noexcept { return 2.0 * cell_radius_m / grid_k; }
  void validate() const;  // throws std::invalid_argument

  friend bool operator==(const CellConfig&, const CellConfig&) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

struct GridCell {
  int row = 0;
  int col = 0;
  friend constexpr auto operator<=>(GridCell, GridCell) = default;
};

inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) noexcept { return 10.0 * std::log10(v); }

double distance_m(Vec2 a, Vec2 b) noexcept;

// intercept + slope * log10(d); distances below min_distance_m are clamped up.
double path_loss_db(const CellConfig&, double d_m) noexcept;

// density + 10 log10(bandwidth) + noise figure, in dBm.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db,
                       double noise_density_dbm_hz = -174.0) noexcept;

// Total eNB power split evenly across the RB grid, in dBm.
double per_rb_tx_power_dbm(const CellConfig&) noexcept;

// Shannon rate of one RB at the given linear SNR, with the spectral
// efficiency capped. Returns Mb/s.
double rb_rate_mbps(const CellConfig&, double snr_linear) noexcept;

// Grid cell containing a position; positions on the boundary (or outside)
// clamp to the nearest cell.
GridCell cell_of(const CellConfig&, Vec2) noexcept;
Vec2 cell_center(const CellConfig&, GridCell) noexcept;

// One slot of straight-line motion toward target at the given speed, with
// arrival clamp, confined to the coverage square.
Vec2 step_position(const CellConfig&, Vec2 pos, Vec2 target, double speed_mps,
                   double ts_len_s) noexcept;

// Log-normal shadowing for one user in one grid cell, in dB. A pure function
// of (seed, user, cell): constant while the user stays in the cell and
// reproduced exactly on re-entry.
double shadowing_db(const CellConfig&, std::uint64_t seed, int user, GridCell) noexcept;

// Link state of one resource block in one slot.
struct RbState {
  double path_loss_db = 0.0;
  double shadowing_db = 0.0;
  double fading_gain = 0.0;  // linear power gain, exponential with unit mean
  double snr = 0.0;          // linear
  double rate_mbps = 0.0;
};

// Samples the full RB row for one user in one slot: one shared path loss and
// shadowing value, independent per-RB fading. out.size() must equal num_rbs.
void sample_channel(const CellConfig&, std::uint64_t seed, int user,
                    std::int64_t ts, Vec2 pos, std::span<RbState> out);
std::vector<RbState> sample_channel(const CellConfig&, std::uint64_t seed,
                                    int user, std::int64_t ts, Vec2 pos);

// Moment accumulators for the distribution checks and the benchmark.
struct ChannelStats {
  std::int64_t fading_n = 0;
  double fading_sum = 0.0;
  double fading_sum_sq = 0.0;
  std::int64_t shadow_n = 0;
  double shadow_sum = 0.0;
  double shadow_sum_sq = 0.0;
  double rate_sum_mbps = 0.0;

  double fading_mean() const noexcept;
  double fading_std() const noexcept;
  double shadow_mean_db() const noexcept;
  double shadow_std_db() const noexcept;

  friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
};

// Scans fading/rate draws over num_users x num_ts slots at a fixed position
// plus every user's shadowing across the whole grid. The parallel path chunks
// by user and merges in user order, so its result is bit-identical to the
// serial path on any thread count.
ChannelStats collect_channel_stats(const CellConfig&, std::uint64_t seed,
                                   int num_users, std::int64_t num_ts, Vec2 pos,
                                   bool parallel);

}  // namespace persim::phy
