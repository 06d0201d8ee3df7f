#pragma once

#include <vector>

#include "persim/synth.hpp"

namespace persim::ml {

// Layout of an encoded context vector:
//   [sin t, cos t | day-phase one-hot | location one-hot | speed | app one-hot]
struct FeatureLayout {
  int num_phases = 4;

  int dim() const noexcept {
    return 2 + num_phases + synth::kNumLocations + 1 + synth::kNumApps;
  }
  int phase_offset() const noexcept { return 2; }
  int location_offset() const noexcept { return 2 + num_phases; }
  int speed_offset() const noexcept { return location_offset() + synth::kNumLocations; }
  int app_offset() const noexcept { return speed_offset() + 1; }

  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

using FeatureVector = std::vector<double>;

FeatureLayout layout_for(const synth::GenParams&) noexcept;

// Encodes one slot of context. Time of day becomes a point on the unit
// circle; speed is scaled by speed_norm_mps and clipped to [0, 1].
FeatureVector preprocess(const synth::GenParams&, const synth::ContextRecord&);

// One-hot block decoders (argmax within the block). They throw on a vector
// of the wrong dimension.
int phase_of(const FeatureLayout&, const FeatureVector&);
synth::LocationCategory location_of(const FeatureLayout&, const FeatureVector&);
synth::Application application_of(const FeatureLayout&, const FeatureVector&);

}  // namespace persim::ml
