// Times the two data-generation kernels in their serial and parallel forms
// and checks that both produce identical output. Run manually:
//   build/bench/bench_kernels [scale]
// where scale multiplies the default workload (default 1).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "persim/channel.hpp"
#include "persim/config.hpp"
#include "persim/synth.hpp"

using namespace persim;

namespace {

template <typename F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_dataset(const synth::Dataset& a, const synth::Dataset& b) {
  if (a.num_personas != b.num_personas || a.users_per_persona != b.users_per_persona ||
      a.samples.size() != b.samples.size())
    return false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& x = a.samples[i];
    const auto& y = b.samples[i];
    if (x.user_id != y.user_id || x.persona_id != y.persona_id ||
        x.qos_p_mbps != y.qos_p_mbps || x.satisfaction != y.satisfaction ||
        x.ctx.ts_index != y.ctx.ts_index || x.ctx.time_of_day_s != y.ctx.time_of_day_s ||
        x.ctx.cell != y.ctx.cell || x.ctx.pos != y.ctx.pos ||
        x.ctx.location != y.ctx.location || x.ctx.speed_mps != y.ctx.speed_mps ||
        x.ctx.app != y.ctx.app)
      return false;
  }
  return true;
}

void row(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-16s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   outputs %s\n", name,
              serial_s, parallel_s, serial_s / parallel_s, identical ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::max(1, std::atoi(argv[1])) : 1;
  const Config cfg = default_config();

  {
    const std::int64_t duration = 21600 * scale;
    synth::Dataset serial, parallel;
    const double ts = timed([&] {
      serial = synth::generate_dataset(cfg.cell, cfg.synth, cfg.apps, cfg.personas, 2, duration,
                                       cfg.sim.seed, false);
    });
    const double tp = timed([&] {
      parallel = synth::generate_dataset(cfg.cell, cfg.synth, cfg.apps, cfg.personas, 2, duration,
                                         cfg.sim.seed, true);
    });
    std::printf("dataset: %zu labelled samples\n", serial.samples.size());
    row("gen-dataset", ts, tp, same_dataset(serial, parallel));
  }

  {
    const std::int64_t num_ts = 20000 * scale;
    phy::ChannelStats serial, parallel;
    const double ts = timed(
        [&] { serial = phy::collect_channel_stats(cfg.cell, 5, 16, num_ts, {120.0, -45.0}, false); });
    const double tp = timed(
        [&] { parallel = phy::collect_channel_stats(cfg.cell, 5, 16, num_ts, {120.0, -45.0}, true); });
    std::printf("channel: %lld fading draws, %lld shadowing draws\n",
                static_cast<long long>(serial.fading_n), static_cast<long long>(serial.shadow_n));
    row("channel-stats", ts, tp, serial == parallel);
  }

  return 0;
}
