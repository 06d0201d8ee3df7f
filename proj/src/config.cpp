#include "persim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "persim/textio.hpp"

namespace persim {

using synth::Application;
using synth::LocationCategory;
using synth::Persona;
using synth::ScheduleWindow;
using synth::kNumApps;

namespace {

synth::AppMix single_app(Application a) {
  synth::AppMix mix;
  mix.prob[static_cast<std::size_t>(a)] = 1.0;
  return mix;
}

ScheduleWindow window(double start_s, double end_s, LocationCategory place, Application app) {
  return ScheduleWindow{start_s, end_s, place, single_app(app)};
}

synth::ToleranceKey tol(LocationCategory l, Application a, int phase) {
  return {static_cast<int>(l), static_cast<int>(a), phase};
}

}  // namespace

std::vector<Persona> default_personas() {
  using enum LocationCategory;
  using enum Application;
  std::vector<Persona> ps;

  {
    // Walks to a nearby office; strict about rate at the desk, happy to let a
    // relaxed evening stream degrade further before complaining.
    Persona p;
    p.id = 0;
    p.name = "office_commuter";
    p.speed_mps = 1.4;
    p.tolerance_default = 0.85;
    p.anchors = {{home, {60, 42}}, {work, {44, 58}}, {commute, {52, 50}}, {other, {55, 44}}};
    p.schedule = {
        window(0, 21600, home, browsing),     window(21600, 27720, home, voice),
        window(27720, 28080, commute, voice), window(28080, 43200, work, voice),
        window(43200, 61200, work, browsing), window(61200, 61560, commute, browsing),
        window(61560, 64800, home, browsing), window(64800, 86400, home, video),
    };
    p.tolerance_by_context = {{tol(home, video, 3), 0.55}, {tol(work, browsing, 2), 0.9}};
    ps.push_back(std::move(p));
  }
  {
    // Streams most of the day from the couch with a short late-morning
    // errand; tolerant at home, much less so while out.
    Persona p;
    p.id = 1;
    p.name = "home_streamer";
    p.speed_mps = 1.0;
    p.tolerance_default = 0.35;
    p.anchors = {{home, {42, 45}}, {other, {50, 57}}};
    p.schedule = {
        window(0, 37800, home, video),        window(37800, 38160, commute, video),
        window(38160, 42480, other, video),   window(42480, 42840, commute, video),
        window(42840, 64800, home, video),    window(64800, 86400, home, browsing),
    };
    p.tolerance_by_context = {{tol(other, video, 1), 0.8}, {tol(home, browsing, 3), 0.2}};
    ps.push_back(std::move(p));
  }
  {
    // Bikes between home, campus, and a club; evening matches at home are
    // where latency hurts, so the tolerance band collapses there.
    Persona p;
    p.id = 2;
    p.name = "campus_gamer";
    p.speed_mps = 4.0;
    p.tolerance_default = 0.6;
    p.anchors = {{home, {58, 55}}, {work, {45, 40}}, {other, {52, 58}}};
    p.schedule = {
        window(0, 21600, home, gaming),       window(21600, 29520, home, browsing),
        window(29520, 29700, commute, browsing), window(29700, 43200, work, browsing),
        window(43200, 54000, work, voice),    window(54000, 54180, commute, voice),
        window(54180, 62640, other, voice),   window(62640, 62820, commute, voice),
        window(62820, 64800, home, voice),    window(64800, 86400, home, gaming),
    };
    p.tolerance_by_context = {{tol(home, gaming, 3), 0.92},
                              {tol(home, gaming, 0), 0.45},
                              {tol(work, browsing, 1), 0.7}};
    ps.push_back(std::move(p));
  }
  {
    // Driver on a fixed loop; coordinates over voice at the depot ends of the
    // day and plays in the breaks, indifferent to rate most of the time.
    Persona p;
    p.id = 3;
    p.name = "field_courier";
    p.speed_mps = 8.0;
    p.tolerance_default = 0.2;
    p.anchors = {{home, {38, 52}}, {work, {50, 50}}, {other, {62, 38}}};
    p.schedule = {
        window(0, 21600, home, voice),        window(21600, 25200, home, gaming),
        window(25200, 25380, commute, gaming), window(25380, 43200, work, gaming),
        window(43200, 43380, commute, gaming), window(43380, 57600, other, gaming),
        window(57600, 57780, commute, gaming), window(57780, 64800, work, gaming),
        window(64800, 68400, work, voice),    window(68400, 68580, commute, voice),
        window(68580, 86400, home, voice),
    };
    p.tolerance_by_context = {{tol(work, gaming, 1), 0.5}, {tol(work, gaming, 2), 0.55}};
    ps.push_back(std::move(p));
  }
  return ps;
}

Config default_config() {
  Config c;
  c.personas = default_personas();
  return c;
}

void Config::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  cell.validate();
  synth.validate();
  for (int a = 0; a < kNumApps; ++a)
    if (!(apps.demand_mbps[static_cast<std::size_t>(a)] > 0.0))
      fail("application demands must be positive");
  if (personas.empty()) fail("at least one persona is required");
  for (std::size_t i = 0; i < personas.size(); ++i) {
    personas[i].validate();
    if (personas[i].id != static_cast<int>(i)) fail("persona ids must match their index");
  }
  for (const Persona& p : personas)
    for (const auto& [loc, cell_rc] : p.anchors)
      if (cell_rc.row < 0 || cell_rc.row >= cell.grid_k || cell_rc.col < 0 ||
          cell_rc.col >= cell.grid_k)
        fail("persona anchor outside the grid");
  if (synth.ts_len_s != sim.ts_len_s)
    fail("internal slot length mismatch (sim.ts_len_s drives both)");
  if (gen.users_per_persona < 1) fail("gen.users_per_persona must be >= 1");
  if (gen.duration_s < 1) fail("gen.duration_s must be >= 1");
  if (gen.qos_sampling != "uniform") fail("gen.qos_sampling: only 'uniform' is supported");
  if (!(learn.eta > 0.0 && learn.eta <= 1.0)) fail("learn.eta must be in (0, 1]");
  if (!(learn.drift_threshold > 0.0)) fail("learn.drift_threshold must be positive");
  if (!(learn.softmax_temp > 0.0)) fail("learn.softmax_temp must be positive");
  if (!(learn.holdout_frac >= 0.0 && learn.holdout_frac < 1.0))
    fail("learn.holdout_frac must be in [0, 1)");
  if (learn.cold_samples < 0) fail("learn.cold_samples must be >= 0");
  if (learn.num_clusters < 1) fail("learn.num_clusters must be >= 1");
  if (sim.duration_s < 1) fail("sim.duration_s must be >= 1");
  if (!(sim.ts_len_s > 0.0)) fail("sim.ts_len_s must be positive");
  if (sim.s_min < 1 || sim.s_min > zot::kLevels) fail("sim.s_min must be in 1..5");
  if (sim.user_personas.empty()) fail("sim.users must list at least one persona id");
  for (int pid : sim.user_personas)
    if (pid < 0 || pid >= static_cast<int>(personas.size()))
      fail("sim.users references an unknown persona id");
  if (!(sim.warmup_s >= 0.0)) fail("sim.warmup_s must be >= 0");
}

namespace {

struct KeyDef {
  std::string name;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

using Ref = Config&;

KeyDef dbl(std::string name, std::function<double&(Ref)> ref) {
  auto g = ref;
  return {name,
          [name, ref](Config& c, std::string_view v) { ref(c) = textio::parse_double(v, name.c_str()); },
          [g](const Config& c) { return textio::format_double(g(const_cast<Config&>(c))); }};
}

KeyDef intk(std::string name, std::function<int&(Ref)> ref) {
  auto g = ref;
  return {name,
          [name, ref](Config& c, std::string_view v) {
            ref(c) = static_cast<int>(textio::parse_int(v, name.c_str()));
          },
          [g](const Config& c) { return std::to_string(g(const_cast<Config&>(c))); }};
}

KeyDef i64k(std::string name, std::function<std::int64_t&(Ref)> ref) {
  auto g = ref;
  return {name,
          [name, ref](Config& c, std::string_view v) { ref(c) = textio::parse_int(v, name.c_str()); },
          [g](const Config& c) { return std::to_string(g(const_cast<Config&>(c))); }};
}

KeyDef u64k(std::string name, std::function<std::uint64_t&(Ref)> ref) {
  auto g = ref;
  return {name,
          [name, ref](Config& c, std::string_view v) {
            std::string_view s = textio::trim(v);
            std::uint64_t out = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc{} || p != s.data() + s.size())
              throw std::runtime_error("bad value for " + name);
            ref(c) = out;
          },
          [g](const Config& c) { return std::to_string(g(const_cast<Config&>(c))); }};
}

KeyDef boolk(std::string name, std::function<bool&(Ref)> ref) {
  auto g = ref;
  return {name,
          [name, ref](Config& c, std::string_view v) {
            std::string_view s = textio::trim(v);
            if (s == "true") ref(c) = true;
            else if (s == "false") ref(c) = false;
            else throw std::runtime_error(name + " must be true or false");
          },
          [g](const Config& c) { return g(const_cast<Config&>(c)) ? "true" : "false"; }};
}

KeyDef strk(std::string name, std::function<std::string&(Ref)> ref) {
  auto g = ref;
  return {name,
          [ref](Config& c, std::string_view v) { ref(c) = std::string(textio::trim(v)); },
          [g](const Config& c) { return g(const_cast<Config&>(c)); }};
}

KeyDef dlist(std::string name, std::function<std::vector<double>&(Ref)> ref) {
  auto g = ref;
  return {name,
          [name, ref](Config& c, std::string_view v) {
            std::vector<double> out;
            for (std::string_view part : textio::split(v, ','))
              out.push_back(textio::parse_double(part, name.c_str()));
            ref(c) = std::move(out);
          },
          [g](const Config& c) {
            std::string s;
            for (double v : g(const_cast<Config&>(c))) {
              if (!s.empty()) s += ',';
              textio::append_double(s, v);
            }
            return s;
          }};
}

KeyDef ilist(std::string name, std::function<std::vector<int>&(Ref)> ref) {
  auto g = ref;
  return {name,
          [name, ref](Config& c, std::string_view v) {
            std::vector<int> out;
            for (std::string_view part : textio::split(v, ','))
              out.push_back(static_cast<int>(textio::parse_int(part, name.c_str())));
            ref(c) = std::move(out);
          },
          [g](const Config& c) {
            std::string s;
            for (int v : g(const_cast<Config&>(c))) {
              if (!s.empty()) s += ',';
              s += std::to_string(v);
            }
            return s;
          }};
}

// One table drives both directions, so the file format cannot drift from the
// serializer.
const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> t;
    t.push_back(intk("cell.num_enb", [](Ref c) -> int& { return c.cell.num_enb; }));
    t.push_back(strk("cell.fading", [](Ref c) -> std::string& { return c.cell.fading_model; }));
    t.push_back(intk("cell.num_rbs", [](Ref c) -> int& { return c.cell.num_rbs; }));
    t.push_back(intk("cell.subcarriers_per_rb",
                     [](Ref c) -> int& { return c.cell.subcarriers_per_rb; }));
    t.push_back(dbl("cell.rb_bandwidth_hz", [](Ref c) -> double& { return c.cell.rb_bandwidth_hz; }));
    t.push_back(dbl("cell.carrier_freq_ghz", [](Ref c) -> double& { return c.cell.carrier_freq_ghz; }));
    t.push_back(dbl("cell.path_loss_intercept_db",
                    [](Ref c) -> double& { return c.cell.path_loss_intercept_db; }));
    t.push_back(dbl("cell.path_loss_slope_db",
                    [](Ref c) -> double& { return c.cell.path_loss_slope_db; }));
    t.push_back(dbl("cell.shadowing_std_db", [](Ref c) -> double& { return c.cell.shadowing_std_db; }));
    t.push_back(dbl("cell.noise_figure_db", [](Ref c) -> double& { return c.cell.noise_figure_db; }));
    t.push_back(dbl("cell.noise_density_dbm_hz",
                    [](Ref c) -> double& { return c.cell.noise_density_dbm_hz; }));
    t.push_back(intk("cell.grid_k", [](Ref c) -> int& { return c.cell.grid_k; }));
    t.push_back(dbl("cell.cell_radius_m", [](Ref c) -> double& { return c.cell.cell_radius_m; }));
    t.push_back(dbl("cell.enb_tx_power_dbm", [](Ref c) -> double& { return c.cell.enb_tx_power_dbm; }));
    t.push_back(dbl("cell.min_distance_m", [](Ref c) -> double& { return c.cell.min_distance_m; }));
    t.push_back(dbl("cell.se_cap_bps_hz", [](Ref c) -> double& { return c.cell.se_cap_bps_hz; }));

    t.push_back(dbl("apps.video_mbps", [](Ref c) -> double& { return c.apps.demand_mbps[0]; }));
    t.push_back(dbl("apps.voice_mbps", [](Ref c) -> double& { return c.apps.demand_mbps[1]; }));
    t.push_back(dbl("apps.browsing_mbps", [](Ref c) -> double& { return c.apps.demand_mbps[2]; }));
    t.push_back(dbl("apps.gaming_mbps", [](Ref c) -> double& { return c.apps.demand_mbps[3]; }));

    t.push_back(dlist("synth.day_phase_bounds_s",
                      [](Ref c) -> std::vector<double>& { return c.synth.day_phase_bounds_s; }));
    t.push_back(dbl("synth.anchor_radius_m", [](Ref c) -> double& { return c.synth.anchor_radius_m; }));
    t.push_back(dbl("synth.dwell_radius_m", [](Ref c) -> double& { return c.synth.dwell_radius_m; }));
    t.push_back(dbl("synth.dwell_jitter_m", [](Ref c) -> double& { return c.synth.dwell_jitter_m; }));
    t.push_back(dbl("synth.min_adequate_frac",
                    [](Ref c) -> double& { return c.synth.min_adequate_frac; }));
    t.push_back(dbl("synth.app_session_s", [](Ref c) -> double& { return c.synth.app_session_s; }));
    t.push_back(dbl("synth.speed_norm_mps", [](Ref c) -> double& { return c.synth.speed_norm_mps; }));

    t.push_back(intk("gen.users_per_persona", [](Ref c) -> int& { return c.gen.users_per_persona; }));
    t.push_back(i64k("gen.duration_s", [](Ref c) -> std::int64_t& { return c.gen.duration_s; }));
    t.push_back(strk("gen.qos_sampling", [](Ref c) -> std::string& { return c.gen.qos_sampling; }));

    t.push_back(dbl("learn.eta", [](Ref c) -> double& { return c.learn.eta; }));
    t.push_back(dbl("learn.drift_threshold", [](Ref c) -> double& { return c.learn.drift_threshold; }));
    t.push_back(dbl("learn.softmax_temp", [](Ref c) -> double& { return c.learn.softmax_temp; }));
    t.push_back(dbl("learn.holdout_frac", [](Ref c) -> double& { return c.learn.holdout_frac; }));
    t.push_back(intk("learn.cold_samples", [](Ref c) -> int& { return c.learn.cold_samples; }));
    t.push_back(boolk("learn.cluster", [](Ref c) -> bool& { return c.learn.cluster; }));
    t.push_back(intk("learn.num_clusters", [](Ref c) -> int& { return c.learn.num_clusters; }));

    t.push_back(i64k("sim.duration_s", [](Ref c) -> std::int64_t& { return c.sim.duration_s; }));
    // One slot length drives the tracer and the loop; a split here would
    // desynchronize slot indices between them.
    t.push_back(KeyDef{
        "sim.ts_len_s",
        [](Config& c, std::string_view v) {
          double len = textio::parse_double(v, "sim.ts_len_s");
          c.sim.ts_len_s = len;
          c.synth.ts_len_s = len;
        },
        [](const Config& c) { return textio::format_double(c.sim.ts_len_s); }});
    t.push_back(intk("sim.s_min", [](Ref c) -> int& { return c.sim.s_min; }));
    t.push_back(ilist("sim.users", [](Ref c) -> std::vector<int>& { return c.sim.user_personas; }));
    t.push_back(dbl("sim.warmup_s", [](Ref c) -> double& { return c.sim.warmup_s; }));
    t.push_back(u64k("sim.seed", [](Ref c) -> std::uint64_t& { return c.sim.seed; }));
    return t;
  }();
  return table;
}

const KeyDef* find_key(std::string_view name) {
  for (const KeyDef& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

// ---- persona sub-grammar ----

LocationCategory need_location(std::string_view s, const std::string& key) {
  auto loc = synth::parse_location(textio::trim(s));
  if (!loc) throw std::runtime_error(key + ": unknown location '" + std::string(s) + "'");
  return *loc;
}

Application need_application(std::string_view s, const std::string& key) {
  auto app = synth::parse_application(textio::trim(s));
  if (!app) throw std::runtime_error(key + ": unknown application '" + std::string(s) + "'");
  return *app;
}

synth::AppMix parse_mix(std::string_view s, const std::string& key) {
  synth::AppMix mix;
  for (std::string_view entry : textio::split(s, ';')) {
    auto parts = textio::split(entry, ':');
    if (parts.size() != 2) throw std::runtime_error(key + ": app mix entries are app:prob");
    Application app = need_application(parts[0], key);
    mix.prob[static_cast<std::size_t>(app)] = textio::parse_double(parts[1], key.c_str());
  }
  if (!mix.valid()) throw std::runtime_error(key + ": app mix must be non-negative and sum to 1");
  return mix;
}

ScheduleWindow parse_window(std::string_view s, const std::string& key) {
  auto parts = textio::split(s, ',');
  if (parts.size() != 4)
    throw std::runtime_error(key + ": windows are start_s,end_s,place,app:prob[;app:prob]");
  ScheduleWindow w;
  w.start_s = textio::parse_double(parts[0], key.c_str());
  w.end_s = textio::parse_double(parts[1], key.c_str());
  w.place = need_location(parts[2], key);
  w.apps = parse_mix(parts[3], key);
  return w;
}

int parse_index(std::string_view s, const std::string& key) {
  std::int64_t v = textio::parse_int(s, key.c_str());
  if (v < 0 || v > 1'000'000) throw std::runtime_error(key + ": bad index");
  return static_cast<int>(v);
}

std::vector<Persona> build_personas(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  // Group "persona.<i>.<sub>" by index, then assemble each persona.
  std::map<int, std::vector<std::pair<std::string, std::string>>> grouped;
  for (const auto& [key, value] : entries) {
    std::string_view rest = std::string_view(key).substr(std::string_view("persona.").size());
    std::size_t dot = rest.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 >= rest.size())
      throw std::runtime_error(key + ": expected persona.<index>.<field>");
    int idx = parse_index(rest.substr(0, dot), key);
    grouped[idx].emplace_back(std::string(rest.substr(dot + 1)), value);
  }

  std::vector<Persona> personas;
  int expect = 0;
  for (const auto& [idx, subs] : grouped) {
    if (idx != expect++)
      throw std::runtime_error("persona indices must be contiguous from 0; missing persona." +
                               std::to_string(expect - 1));
    Persona p;
    p.id = idx;
    p.name = "persona_" + std::to_string(idx);
    p.tolerance_by_context.clear();
    std::map<int, ScheduleWindow> windows;

    for (const auto& [sub, value] : subs) {
      const std::string key = "persona." + std::to_string(idx) + "." + sub;
      if (sub == "name") {
        if (value.empty()) throw std::runtime_error(key + ": name must not be empty");
        p.name = value;
      } else if (sub == "speed_mps") {
        p.speed_mps = textio::parse_double(value, key.c_str());
      } else if (sub == "tolerance_default") {
        p.tolerance_default = textio::parse_double(value, key.c_str());
      } else if (sub == "tolerance_noise_std_mbps") {
        p.tolerance_noise_std_mbps = textio::parse_double(value, key.c_str());
      } else if (sub.starts_with("anchor.")) {
        LocationCategory loc = need_location(sub.substr(7), key);
        auto rc = textio::split(value, ',');
        if (rc.size() != 2) throw std::runtime_error(key + ": anchors are row,col");
        p.anchors[loc] = phy::GridCell{static_cast<int>(textio::parse_int(rc[0], key.c_str())),
                                       static_cast<int>(textio::parse_int(rc[1], key.c_str()))};
      } else if (sub.starts_with("window.")) {
        int w = parse_index(sub.substr(7), key);
        if (windows.count(w)) throw std::runtime_error(key + ": duplicate window index");
        windows[w] = parse_window(value, key);
      } else if (sub.starts_with("tolerance.")) {
        auto parts = textio::split(std::string_view(sub).substr(10), '.');
        if (parts.size() != 3)
          throw std::runtime_error(key + ": overrides are tolerance.<loc>.<app>.<phase|any>");
        LocationCategory loc = need_location(parts[0], key);
        Application app = need_application(parts[1], key);
        int phase = (textio::trim(parts[2]) == "any") ? -1 : parse_index(parts[2], key);
        p.tolerance_by_context[tol(loc, app, phase)] = textio::parse_double(value, key.c_str());
      } else {
        throw std::runtime_error("unknown persona field: " + key);
      }
    }

    int w = 0;
    for (const auto& [widx, win] : windows) {
      if (widx != w++)
        throw std::runtime_error("persona " + std::to_string(idx) +
                                 ": window indices must be contiguous from 0");
      p.schedule.push_back(win);
    }
    personas.push_back(std::move(p));
  }
  return personas;
}

}  // namespace

Config parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> scalars;
  std::vector<std::pair<std::string, std::string>> persona_entries;
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string_view sv = textio::trim(line);
    if (sv.empty()) continue;
    std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key(textio::trim(sv.substr(0, eq)));
    std::string value(textio::trim(sv.substr(eq + 1)));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": duplicate key '" +
                               key + "'");
    if (key.starts_with("persona.")) {
      persona_entries.emplace_back(std::move(key), std::move(value));
    } else if (find_key(key)) {
      scalars.emplace_back(std::move(key), std::move(value));
    } else {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" + key +
                               "'");
    }
  }

  Config cfg = default_config();
  for (const auto& [key, value] : scalars) find_key(key)->set(cfg, value);
  if (!persona_entries.empty()) cfg.personas = build_personas(persona_entries);
  cfg.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const Config& cfg) {
  std::string out;
  out.reserve(4096);
  std::string section;
  for (const KeyDef& k : key_table()) {
    std::string_view prefix = std::string_view(k.name).substr(0, k.name.find('.'));
    if (prefix != section) {
      if (!out.empty()) out += '\n';
      section = prefix;
      out += "# ";
      out += section;
      out += '\n';
    }
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += '\n';
  }

  out += "\n# personas\n";
  for (const Persona& p : cfg.personas) {
    const std::string base = "persona." + std::to_string(p.id) + ".";
    out += base + "name = " + p.name + '\n';
    out += base + "speed_mps = " + textio::format_double(p.speed_mps) + '\n';
    out += base + "tolerance_default = " + textio::format_double(p.tolerance_default) + '\n';
    out += base + "tolerance_noise_std_mbps = " +
           textio::format_double(p.tolerance_noise_std_mbps) + '\n';
    for (const auto& [loc, rc] : p.anchors)
      out += base + "anchor." + synth::to_string(loc) + " = " + std::to_string(rc.row) + "," +
             std::to_string(rc.col) + '\n';
    for (std::size_t w = 0; w < p.schedule.size(); ++w) {
      const ScheduleWindow& win = p.schedule[w];
      out += base + "window." + std::to_string(w) + " = " + textio::format_double(win.start_s) +
             "," + textio::format_double(win.end_s) + "," + synth::to_string(win.place) + ",";
      bool first = true;
      for (int a = 0; a < kNumApps; ++a) {
        double prob = win.apps.prob[static_cast<std::size_t>(a)];
        if (prob == 0.0) continue;
        if (!first) out += ';';
        first = false;
        out += synth::to_string(static_cast<Application>(a));
        out += ':';
        textio::append_double(out, prob);
      }
      out += '\n';
    }
    for (const auto& [key, t] : p.tolerance_by_context) {
      out += base + "tolerance." + synth::to_string(static_cast<LocationCategory>(key[0])) + "." +
             synth::to_string(static_cast<Application>(key[1])) + "." +
             (key[2] < 0 ? std::string("any") : std::to_string(key[2])) + " = " +
             textio::format_double(t) + '\n';
    }
    out += '\n';
  }
  return out;
}

std::uint64_t config_digest(const Config& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace persim
