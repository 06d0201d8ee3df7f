#include "persim/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace persim::ml {

FeatureLayout layout_for(const synth::GenParams& gp) noexcept {
  return FeatureLayout{gp.num_phases()};
}

FeatureVector preprocess(const synth::GenParams& gp, const synth::ContextRecord& ctx) {
  FeatureLayout layout = layout_for(gp);
  FeatureVector f(static_cast<std::size_t>(layout.dim()), 0.0);

  double angle = 2.0 * std::numbers::pi * ctx.time_of_day_s / 86400.0;
  f[0] = std::sin(angle);
  f[1] = std::cos(angle);
  f[static_cast<std::size_t>(layout.phase_offset() + synth::day_phase(gp, ctx.time_of_day_s))] = 1.0;
  f[static_cast<std::size_t>(layout.location_offset() + static_cast<int>(ctx.location))] = 1.0;
  f[static_cast<std::size_t>(layout.speed_offset())] =
      std::clamp(ctx.speed_mps / gp.speed_norm_mps, 0.0, 1.0);
  f[static_cast<std::size_t>(layout.app_offset() + static_cast<int>(ctx.app))] = 1.0;
  return f;
}

namespace {

int block_argmax(const FeatureLayout& layout, const FeatureVector& f, int offset, int len) {
  if (static_cast<int>(f.size()) != layout.dim())
    throw std::invalid_argument("feature vector has the wrong dimension");
  int best = 0;
  for (int i = 1; i < len; ++i)
    if (f[static_cast<std::size_t>(offset + i)] > f[static_cast<std::size_t>(offset + best)])
      best = i;
  return best;
}

}  // namespace

int phase_of(const FeatureLayout& layout, const FeatureVector& f) {
  return block_argmax(layout, f, layout.phase_offset(), layout.num_phases);
}

synth::LocationCategory location_of(const FeatureLayout& layout, const FeatureVector& f) {
  return static_cast<synth::LocationCategory>(
      block_argmax(layout, f, layout.location_offset(), synth::kNumLocations));
}

synth::Application application_of(const FeatureLayout& layout, const FeatureVector& f) {
  return static_cast<synth::Application>(
      block_argmax(layout, f, layout.app_offset(), synth::kNumApps));
}

}  // namespace persim::ml
