#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "persim/channel.hpp"
#include "persim/zot.hpp"

namespace persim::synth {

// Enum order doubles as the map_location tie-break priority.
enum class LocationCategory : int { home = 0, work = 1, commute = 2, other = 3 };
inline constexpr int kNumLocations = 4;

enum class Application : int { video = 0, voice = 1, browsing = 2, gaming = 3 };
inline constexpr int kNumApps = 4;

const char* to_string(LocationCategory) noexcept;
const char* to_string(Application) noexcept;
std::optional<LocationCategory> parse_location(std::string_view) noexcept;
std::optional<Application> parse_application(std::string_view) noexcept;

// Constant demanded rate per application class.
struct AppTable {
  std::array<double, kNumApps> demand_mbps{5.0, 0.1, 1.5, 2.5};

  double demand(Application) const;  // throws std::out_of_range on a bad ordinal

  friend bool operator==(const AppTable&, const AppTable&) = default;
};

// Probabilities over applications inside one schedule window.
struct AppMix {
  std::array<double, kNumApps> prob{};

  bool valid() const noexcept;  // non-negative, sums to ~1

  friend bool operator==(const AppMix&, const AppMix&) = default;
};

// Half-open [start_s, end_s) window of the daily routine. place == commute
// means the user is travelling toward the next dwell window's anchor.
struct ScheduleWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  LocationCategory place = LocationCategory::home;
  AppMix apps;

  friend bool operator==(const ScheduleWindow&, const ScheduleWindow&) = default;
};

// Tolerance override key: (location, application, day phase); phase -1
// matches any phase.
using ToleranceKey = std::array<int, 3>;

// A behavioural archetype: daily routine, movement speed, and how tight the
// tolerance thresholds sit in each context. tightness 0 is maximally
// tolerant, 1 pins the top threshold to the demanded rate.
struct Persona {
  int id = 0;
  std::string name;
  double speed_mps = 1.4;
  double tolerance_default = 0.5;
  double tolerance_noise_std_mbps = 0.0;
  std::map<LocationCategory, phy::GridCell> anchors;
  std::vector<ScheduleWindow> schedule;
  std::map<ToleranceKey, double> tolerance_by_context;

  double tightness(LocationCategory, Application, int phase) const noexcept;
  void validate() const;  // throws std::invalid_argument

  friend bool operator==(const Persona&, const Persona&) = default;
};

// One slot of a user's day as the network sees it.
struct ContextRecord {
  std::int64_t ts_index = 0;
  double time_of_day_s = 0.0;
  phy::GridCell cell;
  phy::Vec2 pos;
  LocationCategory location = LocationCategory::other;
  double speed_mps = 0.0;
  Application app = Application::video;
};

struct LabeledSample {
  int user_id = 0;
  int persona_id = 0;
  ContextRecord ctx;
  double qos_p_mbps = 0.0;
  int satisfaction = 1;
};

// Generator knobs shared by tracing, labelling, and feature encoding.
struct GenParams {
  std::vector<double> day_phase_bounds_s{0.0, 6 * 3600.0, 12 * 3600.0, 18 * 3600.0};
  double ts_len_s = 1.0;
  double anchor_radius_m = 60.0;   // map_location catchment around an anchor
  double dwell_radius_m = 6.0;     // wander bound while parked at an anchor
  double dwell_jitter_m = 0.25;    // per-axis step sigma while parked
  double min_adequate_frac = 0.4;  // q_a5 floor as a fraction of demand
  double app_session_s = 300.0;    // app re-draw period inside a window
  double speed_norm_mps = 12.0;    // feature scaling only

  int num_phases() const noexcept { return static_cast<int>(day_phase_bounds_s.size()); }
  void validate() const;  // throws std::invalid_argument

  friend bool operator==(const GenParams&, const GenParams&) = default;
};

// Index of the day phase containing time_of_day_s (bounds are ascending,
// first bound 0; the last phase runs to midnight).
int day_phase(const GenParams&, double time_of_day_s) noexcept;

// Category of a position: the nearest anchor within anchor_radius_m wins,
// exact distance ties resolve in enum order, anything else is `other`.
LocationCategory map_location(const GenParams&,
                              const std::map<LocationCategory, phy::GridCell>& anchors,
                              const phy::CellConfig&, phy::Vec2 pos) noexcept;

// Deterministic mobility + app trace: one record per slot. Same arguments,
// same trace, on any platform.
std::vector<ContextRecord> generate_trace(const phy::CellConfig&, const GenParams&,
                                          const Persona&, int user_id,
                                          std::int64_t duration_s, std::uint64_t seed);

// The profile the oracle scores against in the given context. Tightness maps
// to the top threshold as demand * (min_frac + (1 - min_frac) * tightness);
// lower thresholds sit at quarter fractions of the top one.
zot::ZotProfile ground_truth_profile(const GenParams&, const AppTable&, const Persona&,
                                     const ContextRecord&, std::uint64_t seed);

struct Dataset {
  std::vector<LabeledSample> samples;  // user-major, slot order within a user
  int num_personas = 0;
  int users_per_persona = 0;
};

// Labelled development data. User ids are persona-major: user = p * U + j.
// qos_p is drawn uniformly in [0, demand]; satisfaction comes from the
// ground-truth profile. The parallel path writes each user's block into a
// presized buffer, so its output is byte-identical to the serial path.
Dataset generate_dataset(const phy::CellConfig&, const GenParams&, const AppTable&,
                         std::span<const Persona> personas, int users_per_persona,
                         std::int64_t duration_s, std::uint64_t seed, bool parallel);

void write_dataset_csv(const std::string& path, const Dataset&);
Dataset read_dataset_csv(const std::string& path);

}  // namespace persim::synth
