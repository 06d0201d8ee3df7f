#include "persim/channel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace persim::phy {

void CellConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("cell config: " + what); };
  if (num_enb != 1) fail("num_enb must be 1 (single-cell model)");
  if (fading_model != "rayleigh") fail("only rayleigh fading is implemented");
  if (num_rbs < 1) fail("num_rbs must be positive");
  if (subcarriers_per_rb < 1) fail("subcarriers_per_rb must be positive");
  if (!(rb_bandwidth_hz > 0.0)) fail("rb_bandwidth_hz must be positive");
  if (!(carrier_freq_ghz > 0.0)) fail("carrier_freq_ghz must be positive");
  if (!(shadowing_std_db >= 0.0)) fail("shadowing_std_db must be non-negative");
  if (grid_k < 1) fail("grid_k must be positive");
  if (!(cell_radius_m > 0.0)) fail("cell_radius_m must be positive");
  if (!(min_distance_m > 0.0)) fail("min_distance_m must be positive");
  if (!(se_cap_bps_hz > 0.0)) fail("se_cap_bps_hz must be positive");
}

double distance_m(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double path_loss_db(const CellConfig& cfg, double d_m) noexcept {
  double d = std::max(d_m, cfg.min_distance_m);
  return cfg.path_loss_intercept_db + cfg.path_loss_slope_db * std::log10(d);
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db,
                       double noise_density_dbm_hz) noexcept {
  return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double per_rb_tx_power_dbm(const CellConfig& cfg) noexcept {
  return cfg.enb_tx_power_dbm - 10.0 * std::log10(static_cast<double>(cfg.num_rbs));
}

double rb_rate_mbps(const CellConfig& cfg, double snr_linear) noexcept {
  double se = std::log2(1.0 + std::max(snr_linear, 0.0));
  return cfg.rb_bandwidth_hz * std::min(se, cfg.se_cap_bps_hz) / 1e6;
}

GridCell cell_of(const CellConfig& cfg, Vec2 pos) noexcept {
  double side = cfg.cell_side_m();
  auto index = [&](double v) {
    int i = static_cast<int>(std::floor((v + cfg.cell_radius_m) / side));
    return std::clamp(i, 0, cfg.grid_k - 1);
  };
  return GridCell{index(pos.y), index(pos.x)};
}

Vec2 cell_center(const CellConfig& cfg, GridCell cell) noexcept {
  double side = cfg.cell_side_m();
  return Vec2{(cell.col + 0.5) * side - cfg.cell_radius_m,
              (cell.row + 0.5) * side - cfg.cell_radius_m};
}

Vec2 step_position(const CellConfig& cfg, Vec2 pos, Vec2 target, double speed_mps,
                   double ts_len_s) noexcept {
  double dx = target.x - pos.x;
  double dy = target.y - pos.y;
  double dist = std::hypot(dx, dy);
  double step = speed_mps * ts_len_s;
  Vec2 next = target;
  if (dist > step && dist > 0.0) {
    next = Vec2{pos.x + dx * step / dist, pos.y + dy * step / dist};
  }
  double r = cfg.cell_radius_m;
  next.x = std::clamp(next.x, -r, r);
  next.y = std::clamp(next.y, -r, r);
  return next;
}

double shadowing_db(const CellConfig& cfg, std::uint64_t seed, int user,
                    GridCell cell) noexcept {
  KeyedRng rng(seed, Stream::shadowing,
               {static_cast<std::uint64_t>(user), static_cast<std::uint64_t>(cell.row),
                static_cast<std::uint64_t>(cell.col)});
  return cfg.shadowing_std_db * rng.gaussian();
}

void sample_channel(const CellConfig& cfg, std::uint64_t seed, int user,
                    std::int64_t ts, Vec2 pos, std::span<RbState> out) {
  if (static_cast<int>(out.size()) != cfg.num_rbs)
    throw std::invalid_argument("sample_channel: out span size != num_rbs");

  double pl = path_loss_db(cfg, distance_m(pos, Vec2{0.0, 0.0}));
  double sh = shadowing_db(cfg, seed, user, cell_of(cfg, pos));
  double noise = noise_power_dbm(cfg.rb_bandwidth_hz, cfg.noise_figure_db,
                                 cfg.noise_density_dbm_hz);
  double mean_snr = db_to_linear(per_rb_tx_power_dbm(cfg) - pl - sh - noise);

  KeyedRng rng(seed, Stream::fading,
               {static_cast<std::uint64_t>(user), static_cast<std::uint64_t>(ts)});
  for (int r = 0; r < cfg.num_rbs; ++r) {
    double gain = rng.exponential();
    double snr = mean_snr * gain;
    out[static_cast<std::size_t>(r)] =
        RbState{pl, sh, gain, snr, rb_rate_mbps(cfg, snr)};
  }
}

std::vector<RbState> sample_channel(const CellConfig& cfg, std::uint64_t seed,
                                    int user, std::int64_t ts, Vec2 pos) {
  std::vector<RbState> out(static_cast<std::size_t>(cfg.num_rbs));
  sample_channel(cfg, seed, user, ts, pos, out);
  return out;
}

double ChannelStats::fading_mean() const noexcept {
  return fading_n > 0 ? fading_sum / static_cast<double>(fading_n) : 0.0;
}

double ChannelStats::fading_std() const noexcept {
  if (fading_n < 2) return 0.0;
  double n = static_cast<double>(fading_n);
  return std::sqrt(std::max(fading_sum_sq / n - (fading_sum / n) * (fading_sum / n), 0.0));
}

double ChannelStats::shadow_mean_db() const noexcept {
  return shadow_n > 0 ? shadow_sum / static_cast<double>(shadow_n) : 0.0;
}

double ChannelStats::shadow_std_db() const noexcept {
  if (shadow_n < 2) return 0.0;
  double n = static_cast<double>(shadow_n);
  return std::sqrt(std::max(shadow_sum_sq / n - (shadow_sum / n) * (shadow_sum / n), 0.0));
}

namespace {

// Per-user partial, computed identically by the serial and parallel paths.
ChannelStats user_stats(const CellConfig& cfg, std::uint64_t seed, int user,
                        std::int64_t num_ts, Vec2 pos) {
  ChannelStats s;
  std::vector<RbState> row(static_cast<std::size_t>(cfg.num_rbs));
  for (std::int64_t ts = 0; ts < num_ts; ++ts) {
    sample_channel(cfg, seed, user, ts, pos, row);
    for (const RbState& rb : row) {
      s.fading_n += 1;
      s.fading_sum += rb.fading_gain;
      s.fading_sum_sq += rb.fading_gain * rb.fading_gain;
      s.rate_sum_mbps += rb.rate_mbps;
    }
  }
  for (int r = 0; r < cfg.grid_k; ++r) {
    for (int c = 0; c < cfg.grid_k; ++c) {
      double sh = shadowing_db(cfg, seed, user, GridCell{r, c});
      s.shadow_n += 1;
      s.shadow_sum += sh;
      s.shadow_sum_sq += sh * sh;
    }
  }
  return s;
}

void merge(ChannelStats& into, const ChannelStats& part) {
  into.fading_n += part.fading_n;
  into.fading_sum += part.fading_sum;
  into.fading_sum_sq += part.fading_sum_sq;
  into.shadow_n += part.shadow_n;
  into.shadow_sum += part.shadow_sum;
  into.shadow_sum_sq += part.shadow_sum_sq;
  into.rate_sum_mbps += part.rate_sum_mbps;
}

}  // namespace

ChannelStats collect_channel_stats(const CellConfig& cfg, std::uint64_t seed,
                                   int num_users, std::int64_t num_ts, Vec2 pos,
                                   bool parallel) {
  std::vector<ChannelStats> parts(static_cast<std::size_t>(std::max(num_users, 0)));
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int u = 0; u < num_users; ++u)
      parts[static_cast<std::size_t>(u)] = user_stats(cfg, seed, u, num_ts, pos);
  } else {
    for (int u = 0; u < num_users; ++u)
      parts[static_cast<std::size_t>(u)] = user_stats(cfg, seed, u, num_ts, pos);
  }
  // Merge in user order: float sums stay bit-identical across thread counts.
  ChannelStats total;
  for (const ChannelStats& p : parts) merge(total, p);
  return total;
}

}  // namespace persim::phy
