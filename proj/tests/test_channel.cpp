#include <doctest.h>

#include <cmath>
#include <vector>

#include "persim/channel.hpp"
#include "persim/rng.hpp"

using namespace persim;
using phy::CellConfig;
using phy::GridCell;
using phy::Vec2;

TEST_CASE("path loss oracle values") {
  CellConfig cfg;
  CHECK(phy::path_loss_db(cfg, 1.0) == 35.3);
  CHECK(std::abs(phy::path_loss_db(cfg, 100.0) - (110.5)) <= 0.01);
  CHECK(std::abs(phy::path_loss_db(cfg, 500.0) - (136.78)) <= 0.01);
  // below min_distance clamps up to 1 m
  CHECK(phy::path_loss_db(cfg, 0.05) == 35.3);
}

TEST_CASE("noise power oracle values") {
  CHECK(std::abs(phy::noise_power_dbm(180e3, 9.0) - (-112.45)) <= 0.01);
  CHECK(std::abs(phy::noise_power_dbm(1.0, 0.0) - (-174.0)) <= 1e-9);
  const double one = phy::noise_power_dbm(250e3, 5.0);
  const double two = phy::noise_power_dbm(500e3, 5.0);
  CHECK(std::abs(two - one - (3.0103)) <= 1e-3);
}

TEST_CASE("per-RB transmit power splits the budget evenly") {
  CellConfig cfg;
  CHECK(std::abs(phy::per_rb_tx_power_dbm(cfg) - (46.0 - 10.0 * std::log10(9.0))) <= 1e-9);
}

TEST_CASE("RB rate curve: floor, linear point, cap") {
  CellConfig cfg;
  CHECK(std::abs(phy::rb_rate_mbps(cfg, 0.0) - (0.0)) <= 1e-12);
  CHECK(std::abs(phy::rb_rate_mbps(cfg, 1.0) - (0.18)) <= 1e-9);
  CHECK(std::abs(phy::rb_rate_mbps(cfg, 1e6) - (1.332)) <= 1e-9);
}

TEST_CASE("grid mapping round-trips and clamps") {
  CellConfig cfg;
  CHECK(cfg.cell_side_m() == doctest::Approx(10.0));
  KeyedRng rng(21, Stream::testing, {});
  for (int i = 0; i < 2000; ++i) {
    const GridCell c{rng.uniform_int(cfg.grid_k), rng.uniform_int(cfg.grid_k)};
    CHECK(phy::cell_of(cfg, phy::cell_center(cfg, c)) == c);
  }
  CHECK(phy::cell_of(cfg, Vec2{-1e4, -1e4}) == GridCell{0, 0});
  CHECK(phy::cell_of(cfg, Vec2{1e4, 1e4}) == GridCell{cfg.grid_k - 1, cfg.grid_k - 1});
}

TEST_CASE("step_position stops at the target and respects the square") {
  CellConfig cfg;
  const Vec2 at{10.0, 10.0};
  CHECK(phy::distance_m(phy::step_position(cfg, at, at, 0.0, 1.0), at) ==
        doctest::Approx(0.0));
  // arrival clamp: 1 m away at 5 m/s lands exactly on the target
  const Vec2 target{11.0, 10.0};
  const Vec2 stepped = phy::step_position(cfg, at, target, 5.0, 1.0);
  CHECK(stepped.x == doctest::Approx(11.0));
  CHECK(stepped.y == doctest::Approx(10.0));
  // never leaves the coverage square
  Vec2 edge{499.0, 0.0};
  const Vec2 out = phy::step_position(cfg, edge, Vec2{600.0, 0.0}, 50.0, 1.0);
  CHECK(out.x <= cfg.cell_radius_m);
}

TEST_CASE("shadowing is a pure function of user and cell") {
  CellConfig cfg;
  const GridCell c{50, 60};
  const double v = phy::shadowing_db(cfg, 1, 3, c);
  CHECK(phy::shadowing_db(cfg, 1, 3, c) == v);           // repeatable
  CHECK(phy::shadowing_db(cfg, 1, 3, GridCell{50, 61}) != v);
  CHECK(phy::shadowing_db(cfg, 1, 4, c) != v);
  CHECK(phy::shadowing_db(cfg, 2, 3, c) != v);
}

TEST_CASE("sample_channel rows are self-consistent") {
  CellConfig cfg;
  const Vec2 pos{80.0, -35.0};
  const auto rows = phy::sample_channel(cfg, 9, 2, 1234, pos);
  REQUIRE(rows.size() == static_cast<std::size_t>(cfg.num_rbs));
  const double pl = phy::path_loss_db(cfg, phy::distance_m(pos, Vec2{0.0, 0.0}));
  const double sh = phy::shadowing_db(cfg, 9, 2, phy::cell_of(cfg, pos));
  const double noise = phy::noise_power_dbm(cfg.rb_bandwidth_hz, cfg.noise_figure_db,
                                            cfg.noise_density_dbm_hz);
  const double mean_snr = phy::db_to_linear(phy::per_rb_tx_power_dbm(cfg) - pl - sh - noise);
  for (const auto& rb : rows) {
    CHECK(rb.path_loss_db == pl);
    CHECK(rb.shadowing_db == sh);
    CHECK(rb.fading_gain > 0.0);
    CHECK(rb.snr == doctest::Approx(mean_snr * rb.fading_gain).epsilon(1e-12));
    CHECK(rb.rate_mbps == doctest::Approx(phy::rb_rate_mbps(cfg, rb.snr)).epsilon(1e-12));
  }
  // identical key, identical draw; next slot differs
  const auto again = phy::sample_channel(cfg, 9, 2, 1234, pos);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].fading_gain == again[i].fading_gain);
  const auto next = phy::sample_channel(cfg, 9, 2, 1235, pos);
  CHECK(rows[0].fading_gain != next[0].fading_gain);
}

TEST_CASE("fading and shadowing match their distributions") {
  CellConfig cfg;
  const auto stats =
      phy::collect_channel_stats(cfg, 5, 16, 1500, Vec2{100.0, 50.0}, false);
  REQUIRE(stats.fading_n >= 100000);
  CHECK(std::abs(stats.fading_mean() - (1.0)) <= 0.02);
  REQUIRE(stats.shadow_n >= 100000);
  CHECK(std::abs(stats.shadow_std_db() - (8.0)) <= 0.1);
  CHECK(std::abs(stats.shadow_mean_db()) < 0.1);
}

TEST_CASE("parallel stats equal serial stats bit for bit") {
  CellConfig cfg;
  const Vec2 pos{-60.0, 25.0};
  const auto serial = phy::collect_channel_stats(cfg, 7, 8, 400, pos, false);
  const auto parallel = phy::collect_channel_stats(cfg, 7, 8, 400, pos, true);
  CHECK(serial == parallel);
}

TEST_CASE("stats match a direct per-slot accumulation") {
  CellConfig cfg;
  const Vec2 pos{40.0, 40.0};
  const auto stats = phy::collect_channel_stats(cfg, 11, 2, 50, pos, false);
  double fsum = 0.0, rsum = 0.0;
  std::int64_t n = 0;
  for (int u = 0; u < 2; ++u)
    for (std::int64_t ts = 0; ts < 50; ++ts)
      for (const auto& rb : phy::sample_channel(cfg, 11, u, ts, pos)) {
        fsum += rb.fading_gain;
        rsum += rb.rate_mbps;
        ++n;
      }
  CHECK(stats.fading_n == n);
  CHECK(stats.fading_sum == doctest::Approx(fsum).epsilon(1e-12));
  CHECK(stats.rate_sum_mbps == doctest::Approx(rsum).epsilon(1e-12));
}
