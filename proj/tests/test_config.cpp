#include <doctest.h>

#include <stdexcept>
#include <string>

#include "persim/config.hpp"

using namespace persim;

namespace {

const std::string kTinyPersona =
    "persona.0.name = solo\n"
    "persona.0.speed_mps = 2\n"
    "persona.0.tolerance_default = 0.5\n"
    "persona.0.anchor.home = 50,50\n"
    "persona.0.window.0 = 0,86400,home,video:1\n";

}  // namespace

TEST_CASE("built-in defaults are valid and carry the stock parameters") {
  const auto cfg = default_config();
  CHECK_NOTHROW(cfg.validate());

  CHECK(cfg.cell.num_enb == 1);
  CHECK(cfg.cell.num_rbs == 9);
  CHECK(cfg.cell.subcarriers_per_rb == 12);
  CHECK(cfg.cell.rb_bandwidth_hz == doctest::Approx(180e3));
  CHECK(cfg.cell.carrier_freq_ghz == doctest::Approx(2.0));
  CHECK(cfg.cell.shadowing_std_db == doctest::Approx(8.0));
  CHECK(cfg.cell.noise_figure_db == doctest::Approx(9.0));
  CHECK(cfg.cell.noise_density_dbm_hz == doctest::Approx(-174.0));
  CHECK(cfg.cell.grid_k == 100);
  CHECK(cfg.cell.cell_radius_m == doctest::Approx(500.0));
  CHECK(cfg.cell.enb_tx_power_dbm == doctest::Approx(46.0));
  CHECK(cfg.cell.min_distance_m == doctest::Approx(1.0));
  CHECK(cfg.cell.path_loss_intercept_db == doctest::Approx(35.3));
  CHECK(cfg.cell.path_loss_slope_db == doctest::Approx(37.6));
  CHECK(cfg.cell.fading_model == "rayleigh");

  CHECK(cfg.apps.demand_mbps[0] == doctest::Approx(5.0));   // video
  CHECK(cfg.apps.demand_mbps[1] == doctest::Approx(0.1));   // voice

  CHECK(cfg.personas.size() == 4);
  CHECK(cfg.sim.user_personas.size() == 3);
  CHECK(cfg.sim.duration_s == 86400);
  CHECK(cfg.sim.ts_len_s == doctest::Approx(1.0));
  CHECK(cfg.sim.s_min == 4);
  CHECK(cfg.sim.warmup_s == doctest::Approx(600.0));
  CHECK(cfg.sim.seed == 1);

  CHECK(cfg.learn.eta == doctest::Approx(0.1));
  CHECK(cfg.learn.drift_threshold == doctest::Approx(50.0));
  CHECK(cfg.synth.min_adequate_frac == doctest::Approx(0.4));
}

TEST_CASE("serialize then parse reproduces the config exactly") {
  const auto cfg = default_config();
  const auto text = serialize_config(cfg);
  const auto back = parse_config(text);
  CHECK(back == cfg);
  // and the round trip is idempotent at the text level too
  CHECK(serialize_config(back) == text);
}

TEST_CASE("digest is stable and sensitive") {
  const auto cfg = default_config();
  CHECK(config_digest(cfg) == config_digest(cfg));
  auto tweaked = cfg;
  tweaked.sim.s_min = 5;
  CHECK(config_digest(tweaked) != config_digest(cfg));
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_config("cell.bogus = 1\n"),
                       doctest::Contains("cell.bogus"), std::runtime_error);
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_config("sim.s_min = 4\nsim.s_min = 4\n"),
                       doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("lines must be key = value") {
  CHECK_THROWS_AS(parse_config("sim.s_min\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config("sim.s_min = not_a_number\n"), std::runtime_error);
}

TEST_CASE("comments and blank lines are ignored") {
  const auto cfg = parse_config("# a comment\n\nsim.s_min = 3\n");
  CHECK(cfg.sim.s_min == 3);
  CHECK(cfg.personas.size() == 4);  // defaults kept when no persona keys appear
}

TEST_CASE("any persona key replaces the default persona set") {
  const auto cfg = parse_config(kTinyPersona + "sim.users = 0\n");
  REQUIRE(cfg.personas.size() == 1);
  CHECK(cfg.personas[0].name == "solo");
  CHECK(cfg.personas[0].speed_mps == doctest::Approx(2.0));
  REQUIRE(cfg.sim.user_personas.size() == 1);
  CHECK(cfg.sim.user_personas[0] == 0);
}

TEST_CASE("persona windows and anchors must be complete") {
  // window list not covering the day
  CHECK_THROWS_AS(parse_config("persona.0.name = broken\n"
                               "persona.0.anchor.home = 50,50\n"
                               "persona.0.window.0 = 0,100,home,video:1\n"
                               "sim.users = 0\n"),
                  std::invalid_argument);
  // dwell place without an anchor
  CHECK_THROWS_AS(parse_config("persona.0.name = broken\n"
                               "persona.0.anchor.home = 50,50\n"
                               "persona.0.window.0 = 0,86400,work,video:1\n"
                               "sim.users = 0\n"),
                  std::invalid_argument);
  // persona indices must be contiguous from zero
  CHECK_THROWS_AS(parse_config("persona.1.name = gap\n"
                               "persona.1.anchor.home = 50,50\n"
                               "persona.1.window.0 = 0,86400,home,video:1\n"),
                  std::runtime_error);
}

TEST_CASE("ts_len applies to both the loop and the generator") {
  const auto cfg = parse_config("sim.ts_len_s = 2\n");
  CHECK(cfg.sim.ts_len_s == doctest::Approx(2.0));
  CHECK(cfg.synth.ts_len_s == doctest::Approx(2.0));
}

TEST_CASE("sim.users must reference defined personas") {
  CHECK_THROWS_AS(parse_config("sim.users = 0,9\n"), std::invalid_argument);
}

TEST_CASE("missing config file is a runtime error") {
  CHECK_THROWS_AS(load_config("/nonexistent/persim.cfg"), std::runtime_error);
}

TEST_CASE("tolerance overrides survive the round trip") {
  auto cfg = default_config();
  REQUIRE(!cfg.personas.empty());
  REQUIRE(!cfg.personas[0].tolerance_by_context.empty());
  const auto back = parse_config(serialize_config(cfg));
  CHECK(back.personas[0].tolerance_by_context == cfg.personas[0].tolerance_by_context);
}
