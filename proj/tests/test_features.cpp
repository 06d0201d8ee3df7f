#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "persim/features.hpp"
#include "persim/rng.hpp"

using namespace persim;
using synth::Application;
using synth::LocationCategory;

namespace {

synth::ContextRecord random_context(KeyedRng& rng) {
  synth::ContextRecord ctx;
  ctx.ts_index = rng.uniform_int(100000);
  ctx.time_of_day_s = rng.uniform(0.0, 86400.0);
  ctx.location = static_cast<LocationCategory>(rng.uniform_int(synth::kNumLocations));
  ctx.app = static_cast<Application>(rng.uniform_int(synth::kNumApps));
  ctx.speed_mps = rng.uniform(0.0, 20.0);
  return ctx;
}

}  // namespace

TEST_CASE("layout blocks and dimension") {
  synth::GenParams gp;
  const auto layout = ml::layout_for(gp);
  CHECK(layout.num_phases == 4);
  CHECK(layout.dim() == 2 + 4 + 4 + 1 + 4);
  CHECK(layout.phase_offset() == 2);
  CHECK(layout.location_offset() == 6);
  CHECK(layout.speed_offset() == 10);
  CHECK(layout.app_offset() == 11);
}

TEST_CASE("midnight encodes as sin 0, cos 1") {
  synth::GenParams gp;
  synth::ContextRecord ctx;
  ctx.time_of_day_s = 0.0;
  const auto f = ml::preprocess(gp, ctx);
  CHECK(std::abs(f[0] - (0.0)) <= 1e-12);
  CHECK(std::abs(f[1] - (1.0)) <= 1e-12);
}

TEST_CASE("ts_index is not a feature") {
  synth::GenParams gp;
  KeyedRng rng(41, Stream::testing, {});
  auto a = random_context(rng);
  auto b = a;
  b.ts_index += 12345;
  CHECK(ml::preprocess(gp, a) == ml::preprocess(gp, b));
}

TEST_CASE("one-hot groups are exact and decode back") {
  synth::GenParams gp;
  const auto layout = ml::layout_for(gp);
  KeyedRng rng(41, Stream::testing, {1});
  for (int i = 0; i < 1000; ++i) {
    const auto ctx = random_context(rng);
    const auto f = ml::preprocess(gp, ctx);
    REQUIRE(f.size() == static_cast<std::size_t>(layout.dim()));

    double phase_sum = 0.0, loc_sum = 0.0, app_sum = 0.0;
    for (int p = 0; p < layout.num_phases; ++p)
      phase_sum += f[static_cast<std::size_t>(layout.phase_offset() + p)];
    for (int l = 0; l < synth::kNumLocations; ++l)
      loc_sum += f[static_cast<std::size_t>(layout.location_offset() + l)];
    for (int a = 0; a < synth::kNumApps; ++a)
      app_sum += f[static_cast<std::size_t>(layout.app_offset() + a)];
    CHECK(phase_sum == 1.0);
    CHECK(loc_sum == 1.0);
    CHECK(app_sum == 1.0);

    CHECK(ml::location_of(layout, f) == ctx.location);
    CHECK(ml::application_of(layout, f) == ctx.app);
    CHECK(ml::phase_of(layout, f) == synth::day_phase(gp, ctx.time_of_day_s));
  }
}

TEST_CASE("speed is normalized and clamped") {
  synth::GenParams gp;
  const auto layout = ml::layout_for(gp);
  synth::ContextRecord ctx;
  ctx.speed_mps = 6.0;
  CHECK(ml::preprocess(gp, ctx)[static_cast<std::size_t>(layout.speed_offset())] ==
        doctest::Approx(0.5));
  ctx.speed_mps = 500.0;
  CHECK(ml::preprocess(gp, ctx)[static_cast<std::size_t>(layout.speed_offset())] ==
        doctest::Approx(1.0));
}

TEST_CASE("decoders reject vectors of the wrong size") {
  synth::GenParams gp;
  const auto layout = ml::layout_for(gp);
  ml::FeatureVector wrong(3, 0.0);
  CHECK_THROWS_AS(ml::location_of(layout, wrong), std::invalid_argument);
  CHECK_THROWS_AS(ml::phase_of(layout, wrong), std::invalid_argument);
}
