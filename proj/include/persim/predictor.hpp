#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "persim/config.hpp"
#include "persim/features.hpp"
#include "persim/synth.hpp"
#include "persim/zot.hpp"

namespace persim::ml {

struct TrainReport;

// Context bucket identity: (persona, location, application, day phase).
struct BucketKey {
  int persona = 0;
  int location = 0;
  int app = 0;
  int phase = 0;

  friend auto operator<=>(const BucketKey&, const BucketKey&) = default;
};

// Running threshold estimate for one bucket. adequate[0] is pinned to zero;
// min_above[i] / max_below[i] straddle the true threshold for level i+1.
struct ThresholdEstimate {
  double demand_mbps = 0.0;
  std::array<double, zot::kLevels> adequate{};
  std::array<double, zot::kLevels> min_above{};  // +inf until a sample lands above
  std::array<double, zot::kLevels> max_below{};
  std::int64_t count = 0;
  double drift_score = 0.0;

  friend bool operator==(const ThresholdEstimate&, const ThresholdEstimate&) = default;
};

struct Prototype {
  FeatureVector centroid;
  std::int64_t count = 0;

  friend bool operator==(const Prototype&, const Prototype&) = default;
};

// Two-phase personalization model. Phase 1 scores how much a context looks
// like each persona (softmax over negative squared distances to the nearest
// per-persona prototype). Phase 2 keeps per-bucket tolerance-threshold
// estimates and blends them by those scores.
class TwoPhaseModel {
 public:
  TwoPhaseModel() = default;
  TwoPhaseModel(FeatureLayout, synth::AppTable, LearnParams, int num_personas);

  int num_personas() const noexcept { return num_personas_; }
  const FeatureLayout& layout() const noexcept { return layout_; }
  const LearnParams& params() const noexcept { return params_; }
  bool trained() const noexcept { return !prototypes_.empty(); }
  std::int64_t update_count() const noexcept { return update_count_; }
  std::int64_t drift_resets() const noexcept { return drift_resets_; }

  // Phase 1: persona probability vector, summing to 1. Throws if untrained.
  std::vector<double> predict_persona(const FeatureVector&) const;

  // Phase 2: tolerance profile for this context under persona weights c.
  // A one-hot c returns that persona's bucket estimate exactly.
  zot::ZotProfile predict_profile(const FeatureVector&, const std::vector<double>& c,
                                  synth::Application) const;

  // Satisfaction if the rate were demand - delta (delta clamped to [0, demand]).
  zot::SatisfactionLevel predict_satisfaction(const FeatureVector&,
                                              const std::vector<double>& c,
                                              synth::Application, double delta_mbps) const;

  // Oracle feedback for one served slot. Corrects the responsible bucket
  // (argmax of c): misses nudge the violated thresholds past qos_p at rate
  // eta, agreements decay its drift score and drift the thresholds toward the
  // straddle midpoints at eta/10. A bucket whose drift score passes the
  // threshold is reset and relearns from scratch.
  void online_update(const FeatureVector&, const std::vector<double>& c,
                     synth::Application, double qos_p_mbps, int measured_sat);

  // Versioned flat text file; byte-stable for fixed state.
  void save(const std::string& path) const;
  static TwoPhaseModel load(const std::string& path);

  friend bool operator==(const TwoPhaseModel&, const TwoPhaseModel&) = default;

 private:
  friend std::pair<TwoPhaseModel, TrainReport> train(const synth::Dataset&,
                                                     const synth::GenParams&,
                                                     const synth::AppTable&, const LearnParams&,
                                                     std::uint64_t seed);

  // Estimate lookup chain: bucket, then the persona's per-app aggregate,
  // then a zero-tolerance profile.
  ThresholdEstimate estimate_for(int persona, synth::LocationCategory, synth::Application,
                                 int phase) const;
  static void refresh_from_straddles(ThresholdEstimate&);
  static void clamp_into_straddles(ThresholdEstimate&);
  static void project(ThresholdEstimate&);

  FeatureLayout layout_;
  synth::AppTable apps_;
  LearnParams params_;
  int num_personas_ = 0;
  std::map<BucketKey, Prototype> prototypes_;
  std::map<BucketKey, ThresholdEstimate> buckets_;
  std::map<std::pair<int, int>, ThresholdEstimate> globals_;  // (persona, app)
  std::int64_t update_count_ = 0;
  std::int64_t drift_resets_ = 0;
};

struct TrainReport {
  std::int64_t train_samples = 0;
  std::int64_t holdout_samples = 0;
  int num_personas = 0;
  int buckets = 0;
  double phase1_accuracy = 0.0;    // held-out persona classification
  double phase2_rmse_mbps = 0.0;   // thresholds vs held-out re-estimates
  double fitness_agreement = 0.0;  // predicted vs labelled satisfaction, held out
};

// Offline training. Users are split per persona; the last ceil(holdout_frac
// x users) of each persona's users are held out for the report. With
// LearnParams.cluster set, persona labels are replaced by k-means cluster
// assignments first (see cluster_personas).
std::pair<TwoPhaseModel, TrainReport> train(const synth::Dataset&, const synth::GenParams&,
                                            const synth::AppTable&, const LearnParams&,
                                            std::uint64_t seed = 1);

struct ClusterResult {
  std::vector<int> user_ids;      // sorted
  std::vector<int> user_cluster;  // cluster of user_ids[i]
  std::vector<std::vector<double>> centroids;
  int iterations = 0;
};

// Unsupervised persona discovery: k-means over per-user behaviour aggregates
// (mean feature vector plus mean satisfaction per provided-rate quartile).
// Deterministic for a fixed seed. Throws if k exceeds the number of users.
ClusterResult cluster_personas(const synth::Dataset&, const synth::GenParams&,
                               const synth::AppTable&, int k, std::uint64_t seed);

}  // namespace persim::ml
