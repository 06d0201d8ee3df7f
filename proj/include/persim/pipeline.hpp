#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "persim/allocator.hpp"
#include "persim/config.hpp"
#include "persim/predictor.hpp"
#include "persim/synth.hpp"

namespace persim::sim {

std::string to_string(alloc::PolicyKind);
alloc::PolicyKind parse_policy(std::string_view);

// One (slot, user) row of a production run.
struct TsRecord {
  std::int64_t ts_index = 0;
  int user_id = 0;
  alloc::PolicyKind policy = alloc::PolicyKind::baseline;
  synth::Application app = synth::Application::video;
  synth::LocationCategory location = synth::LocationCategory::home;
  double delta_opt_mbps = 0.0;
  double target_mbps = 0.0;
  int rbs_used = 0;
  double qos_p_mbps = 0.0;
  int sat_pred = 5;
  int sat_meas = 5;
  bool correct = true;
  bool feasible = true;
};

struct RunSummary {
  std::string policy;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  std::int64_t duration_s = 0;
  double ts_len_s = 1.0;
  int num_users = 0;
  double warmup_s = 0.0;
  std::int64_t num_records = 0;
  double total_provided_mbits = 0.0;
  double total_provided_mbits_after_warmup = 0.0;
  double total_demand_mbits = 0.0;
  double avg_satisfaction = 0.0;
  double avg_satisfaction_after_warmup = 0.0;
  double min_user_avg_satisfaction = 0.0;  // after warmup
  double max_user_avg_satisfaction = 0.0;  // after warmup
  std::int64_t infeasible_user_slots = 0;
  double misprediction_rate = 0.0;
  std::array<double, synth::kNumApps> app_demand_mbps{};
};

struct RunResult {
  std::vector<TsRecord> records;  // slot-major, users in id order within a slot
  RunSummary summary;
};

// Offline pass: synthesize a labelled day, train, keep all three pieces.
struct DevResult {
  synth::Dataset dataset;
  ml::TwoPhaseModel model;
  ml::TrainReport report;
};
DevResult run_development(const Config&, std::uint64_t seed, bool parallel = true);

// Test hook: from at_ts onward one persona's tolerance changes underneath the
// model. Only the ground-truth oracle sees it; the model has to adapt.
struct DriftEvent {
  std::int64_t at_ts = 0;
  int persona_id = 0;
  double new_tolerance_default = 0.5;
  bool clear_overrides = true;
};

// Closed loop over sim.duration_s slots. The model is copied and adapts
// locally for the personalized policy; the baseline ignores it. Context and
// channel draws depend only on (seed, user, ts), never on the policy, so runs
// that share a seed are paired row for row.
RunResult run_production(const Config&, alloc::PolicyKind, const ml::TwoPhaseModel* model,
                         std::uint64_t seed, const DriftEvent* drift = nullptr);

struct HourlyRow {
  int hour = 0;
  double demand_mbits = 0.0;
  double baseline_mbits = 0.0;
  double personalized_mbits = 0.0;
  double saved_mbits = 0.0;
  double baseline_avg_sat = 0.0;
  double personalized_avg_sat = 0.0;
};

struct ComparisonReport {
  double demand_total_mbits = 0.0;
  double baseline_total_mbits = 0.0;
  double personalized_total_mbits = 0.0;
  double saved_total_mbits = 0.0;
  double saved_frac_of_baseline = 0.0;
  double baseline_avg_sat = 0.0;
  double personalized_avg_sat = 0.0;
  double baseline_avg_sat_after_warmup = 0.0;
  double personalized_avg_sat_after_warmup = 0.0;
  bool context_match = false;
  std::vector<HourlyRow> hourly;
};

// Pairs two runs row by row. Throws if lengths, config digests, or slot
// lengths differ; context_match records whether every paired row agrees on
// (slot, user, application, location).
ComparisonReport compare(const RunResult& personalized, const RunResult& baseline);

void write_results_csv(const std::string& path, const RunResult&);
// Reads records only; pair with read_summary_json for the totals.
std::vector<TsRecord> read_results_csv(const std::string& path);
void write_summary_json(const std::string& path, const RunSummary&);
RunSummary read_summary_json(const std::string& path);
void write_comparison_report(const std::string& dir, const ComparisonReport&);

}  // namespace persim::sim
