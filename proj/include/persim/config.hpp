#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "persim/channel.hpp"
#include "persim/synth.hpp"

namespace persim {

// Development-data generation run.
struct GenRunParams {
  int users_per_persona = 5;
  std::int64_t duration_s = 86400;
  std::string qos_sampling = "uniform";  // the only supported policy

  friend bool operator==(const GenRunParams&, const GenRunParams&) = default;
};

// Training and online-adaptation knobs.
struct LearnParams {
  double eta = 0.1;              // online correction step
  double drift_threshold = 50.0; // bucket error score that triggers a relearn
  double softmax_temp = 0.25;    // persona probability sharpness
  double holdout_frac = 0.2;     // users per persona held out of training
  int cold_samples = 30;         // updates a fresh bucket copies estimates verbatim
  bool cluster = false;          // discover personas by clustering instead of labels
  int num_clusters = 4;

  friend bool operator==(const LearnParams&, const LearnParams&) = default;
};

// Closed-loop simulation run.
struct SimParams {
  std::int64_t duration_s = 86400;
  double ts_len_s = 1.0;
  int s_min = 4;                       // satisfaction floor the allocator plans for
  std::vector<int> user_personas{0, 1, 2};  // one entry per user: its persona id
  double warmup_s = 600.0;             // excluded from the headline averages
  std::uint64_t seed = 1;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

struct Config {
  phy::CellConfig cell;
  synth::AppTable apps;
  synth::GenParams synth;
  GenRunParams gen;
  LearnParams learn;
  SimParams sim;
  std::vector<synth::Persona> personas;

  void validate() const;  // throws std::invalid_argument

  friend bool operator==(const Config&, const Config&) = default;
};

// Built-in defaults: four personas with distinct daily routines over a
// 100x100 grid, all anchored within ~170 m of the eNB.
Config default_config();
std::vector<synth::Persona> default_personas();

// Flat key = value text, '#' comments. Unknown or duplicate keys are errors.
// If any persona.* key is present, the file's personas replace the defaults
// entirely. parse_config(serialize_config(c)) == c exactly.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);  // throws std::runtime_error on I/O
std::string serialize_config(const Config&);

// Stable digest of the serialized form; paired runs must agree on it.
std::uint64_t config_digest(const Config&);

}  // namespace persim
