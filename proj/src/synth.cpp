#include "persim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "persim/textio.hpp"

namespace persim::synth {

namespace {
constexpr double kDaySeconds = 86400.0;
constexpr std::uint64_t u64(auto v) { return static_cast<std::uint64_t>(v); }
}  // namespace

const char* to_string(LocationCategory c) noexcept {
  switch (c) {
    case LocationCategory::home: return "home";
    case LocationCategory::work: return "work";
    case LocationCategory::commute: return "commute";
    case LocationCategory::other: return "other";
  }
  return "other";
}

const char* to_string(Application a) noexcept {
  switch (a) {
    case Application::video: return "video";
    case Application::voice: return "voice";
    case Application::browsing: return "browsing";
    case Application::gaming: return "gaming";
  }
  return "video";
}

std::optional<LocationCategory> parse_location(std::string_view s) noexcept {
  if (s == "home") return LocationCategory::home;
  if (s == "work") return LocationCategory::work;
  if (s == "commute") return LocationCategory::commute;
  if (s == "other") return LocationCategory::other;
  return std::nullopt;
}

std::optional<Application> parse_application(std::string_view s) noexcept {
  if (s == "video") return Application::video;
  if (s == "voice") return Application::voice;
  if (s == "browsing") return Application::browsing;
  if (s == "gaming") return Application::gaming;
  return std::nullopt;
}

double AppTable::demand(Application a) const {
  int i = static_cast<int>(a);
  if (i < 0 || i >= kNumApps) throw std::out_of_range("unknown application ordinal");
  return demand_mbps[static_cast<std::size_t>(i)];
}

bool AppMix::valid() const noexcept {
  double sum = 0.0;
  for (double p : prob) {
    if (!(p >= 0.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) < 1e-9;
}

double Persona::tightness(LocationCategory loc, Application app, int phase) const noexcept {
  auto it = tolerance_by_context.find({static_cast<int>(loc), static_cast<int>(app), phase});
  if (it != tolerance_by_context.end()) return it->second;
  it = tolerance_by_context.find({static_cast<int>(loc), static_cast<int>(app), -1});
  if (it != tolerance_by_context.end()) return it->second;
  return tolerance_default;
}

void Persona::validate() const {
  auto fail = [this](const std::string& what) {
    throw std::invalid_argument("persona " + std::to_string(id) + ": " + what);
  };
  if (!(speed_mps > 0.0)) fail("speed_mps must be positive");
  if (!(tolerance_default >= 0.0 && tolerance_default <= 1.0))
    fail("tolerance_default must be in [0, 1]");
  if (!(tolerance_noise_std_mbps >= 0.0)) fail("tolerance noise std must be >= 0");
  for (const auto& [key, t] : tolerance_by_context)
    if (!(t >= 0.0 && t <= 1.0)) fail("tolerance override must be in [0, 1]");
  if (schedule.empty()) fail("schedule is empty");
  if (schedule.front().start_s != 0.0) fail("schedule must start at 0");
  if (schedule.back().end_s != kDaySeconds) fail("schedule must end at 86400 s");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScheduleWindow& w = schedule[i];
    if (!(w.start_s < w.end_s)) fail("schedule window is empty or inverted");
    if (i > 0 && schedule[i - 1].end_s != w.start_s) fail("schedule has a gap or overlap");
    if (!w.apps.valid()) fail("window app mix must be non-negative and sum to 1");
    if (w.place != LocationCategory::commute && !anchors.count(w.place))
      fail(std::string("no anchor for schedule place '") + to_string(w.place) + "'");
  }
  if (schedule.front().place == LocationCategory::commute)
    fail("first schedule window cannot be commute");
  bool any_dwell = false;
  for (const ScheduleWindow& w : schedule)
    any_dwell |= (w.place != LocationCategory::commute);
  if (!any_dwell) fail("schedule needs at least one non-commute window");
}

void GenParams::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("generator params: " + what);
  };
  if (day_phase_bounds_s.empty() || day_phase_bounds_s.front() != 0.0)
    fail("day phase bounds must start at 0");
  if (!std::is_sorted(day_phase_bounds_s.begin(), day_phase_bounds_s.end()) ||
      std::adjacent_find(day_phase_bounds_s.begin(), day_phase_bounds_s.end()) !=
          day_phase_bounds_s.end())
    fail("day phase bounds must be strictly increasing");
  if (day_phase_bounds_s.back() >= kDaySeconds) fail("day phase bounds must stay below 86400");
  if (!(ts_len_s > 0.0)) fail("ts_len_s must be positive");
  if (!(anchor_radius_m > 0.0)) fail("anchor_radius_m must be positive");
  if (!(dwell_radius_m >= 0.0)) fail("dwell_radius_m must be >= 0");
  if (!(dwell_jitter_m >= 0.0)) fail("dwell_jitter_m must be >= 0");
  if (!(min_adequate_frac >= 0.0 && min_adequate_frac <= 1.0))
    fail("min_adequate_frac must be in [0, 1]");
  if (!(app_session_s > 0.0)) fail("app_session_s must be positive");
  if (!(speed_norm_mps > 0.0)) fail("speed_norm_mps must be positive");
}

int day_phase(const GenParams& gp, double time_of_day_s) noexcept {
  const auto& b = gp.day_phase_bounds_s;
  auto it = std::upper_bound(b.begin(), b.end(), time_of_day_s);
  int idx = static_cast<int>(it - b.begin()) - 1;
  return std::clamp(idx, 0, gp.num_phases() - 1);
}

LocationCategory map_location(const GenParams& gp,
                              const std::map<LocationCategory, phy::GridCell>& anchors,
                              const phy::CellConfig& cell, phy::Vec2 pos) noexcept {
  LocationCategory best = LocationCategory::other;
  double best_d = gp.anchor_radius_m;
  for (const auto& [cat, anchor] : anchors) {
    double d = phy::distance_m(pos, phy::cell_center(cell, anchor));
    // Strictly closer wins; on an exact tie the map order (enum order) holds.
    if (d <= gp.anchor_radius_m && d < best_d) {
      best = cat;
      best_d = d;
    }
  }
  return best;
}

namespace {

// Index of the schedule window containing tod; windows are contiguous.
std::size_t window_at(const std::vector<ScheduleWindow>& schedule, double tod) noexcept {
  for (std::size_t i = schedule.size(); i-- > 1;)
    if (tod >= schedule[i].start_s) return i;
  return 0;
}

// Anchor the user heads to during a commute window: the next dwell window's
// place, wrapping past midnight.
const ScheduleWindow& next_dwell(const std::vector<ScheduleWindow>& schedule,
                                 std::size_t idx) noexcept {
  for (std::size_t step = 1; step <= schedule.size(); ++step) {
    const ScheduleWindow& w = schedule[(idx + step) % schedule.size()];
    if (w.place != LocationCategory::commute) return w;
  }
  return schedule[idx];  // unreachable; validate() requires a dwell window
}

Application choose_app(const AppMix& mix, KeyedRng& rng) noexcept {
  double u = rng.next_double();
  double acc = 0.0;
  for (int a = 0; a < kNumApps; ++a) {
    acc += mix.prob[static_cast<std::size_t>(a)];
    if (u < acc) return static_cast<Application>(a);
  }
  // Rounding slack: fall back to the heaviest entry.
  int best = 0;
  for (int a = 1; a < kNumApps; ++a)
    if (mix.prob[static_cast<std::size_t>(a)] > mix.prob[static_cast<std::size_t>(best)])
      best = a;
  return static_cast<Application>(best);
}

}  // namespace

std::vector<ContextRecord> generate_trace(const phy::CellConfig& cell, const GenParams& gp,
                                          const Persona& persona, int user_id,
                                          std::int64_t duration_s, std::uint64_t seed) {
  cell.validate();
  gp.validate();
  persona.validate();
  if (duration_s <= 0) throw std::invalid_argument("generate_trace: duration must be positive");

  std::int64_t count = std::llround(static_cast<double>(duration_s) / gp.ts_len_s);
  std::vector<ContextRecord> trace;
  trace.reserve(static_cast<std::size_t>(count));

  phy::Vec2 pos = phy::cell_center(cell, persona.anchors.at(persona.schedule.front().place));
  for (std::int64_t ts = 0; ts < count; ++ts) {
    double time_s = static_cast<double>(ts) * gp.ts_len_s;
    std::int64_t day = static_cast<std::int64_t>(time_s / kDaySeconds);
    double tod = time_s - static_cast<double>(day) * kDaySeconds;

    std::size_t widx = window_at(persona.schedule, tod);
    const ScheduleWindow& w = persona.schedule[widx];

    phy::Vec2 prev = pos;
    if (w.place == LocationCategory::commute) {
      phy::Vec2 target =
          phy::cell_center(cell, persona.anchors.at(next_dwell(persona.schedule, widx).place));
      pos = phy::step_position(cell, pos, target, persona.speed_mps, gp.ts_len_s);
    } else {
      phy::Vec2 anchor = phy::cell_center(cell, persona.anchors.at(w.place));
      if (phy::distance_m(pos, anchor) > gp.dwell_radius_m) {
        // Late arrival (or start-up transient): keep walking to the anchor.
        pos = phy::step_position(cell, pos, anchor, persona.speed_mps, gp.ts_len_s);
      } else if (gp.dwell_jitter_m > 0.0) {
        KeyedRng rng(seed, Stream::dwell_jitter, {u64(user_id), u64(ts)});
        double ox = pos.x - anchor.x + rng.gaussian() * gp.dwell_jitter_m;
        double oy = pos.y - anchor.y + rng.gaussian() * gp.dwell_jitter_m;
        double r = std::hypot(ox, oy);
        if (r > gp.dwell_radius_m && r > 0.0) {
          ox *= gp.dwell_radius_m / r;
          oy *= gp.dwell_radius_m / r;
        }
        pos = phy::Vec2{anchor.x + ox, anchor.y + oy};
      }
    }

    std::int64_t session =
        static_cast<std::int64_t>((tod - w.start_s) / gp.app_session_s);
    KeyedRng app_rng(seed, Stream::app_choice, {u64(user_id), u64(day), u64(widx), u64(session)});

    ContextRecord rec;
    rec.ts_index = ts;
    rec.time_of_day_s = tod;
    rec.pos = pos;
    rec.cell = phy::cell_of(cell, pos);
    rec.location = map_location(gp, persona.anchors, cell, pos);
    rec.speed_mps = phy::distance_m(pos, prev) / gp.ts_len_s;
    rec.app = choose_app(w.apps, app_rng);
    trace.push_back(rec);
  }
  return trace;
}

zot::ZotProfile ground_truth_profile(const GenParams& gp, const AppTable& apps,
                                     const Persona& persona, const ContextRecord& ctx,
                                     std::uint64_t seed) {
  double demand = apps.demand(ctx.app);
  double t = persona.tightness(ctx.location, ctx.app, day_phase(gp, ctx.time_of_day_s));
  double top = demand * (gp.min_adequate_frac + (1.0 - gp.min_adequate_frac) * t);
  if (persona.tolerance_noise_std_mbps > 0.0) {
    KeyedRng rng(seed, Stream::tolerance_noise, {u64(persona.id), u64(ctx.ts_index)});
    top += rng.gaussian() * persona.tolerance_noise_std_mbps;
  }
  top = std::clamp(top, 0.0, demand);
  zot::ZotProfile profile;
  profile.demand_mbps = demand;
  profile.adequate_mbps = {0.0, 0.25 * top, 0.5 * top, 0.75 * top, top};
  return profile;
}

namespace {

void fill_user_samples(const phy::CellConfig& cell, const GenParams& gp,
                       const AppTable& apps, const Persona& persona, int user_id,
                       std::int64_t duration_s, std::uint64_t seed,
                       std::span<LabeledSample> out) {
  std::vector<ContextRecord> trace = generate_trace(cell, gp, persona, user_id, duration_s, seed);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const ContextRecord& ctx = trace[i];
    double demand = apps.demand(ctx.app);
    KeyedRng rng(seed, Stream::qos_sample, {u64(user_id), u64(ctx.ts_index)});
    double qos = rng.uniform(0.0, demand);
    zot::ZotProfile gt = ground_truth_profile(gp, apps, persona, ctx, seed);
    out[i] = LabeledSample{user_id, persona.id, ctx, qos, zot::satisfaction_of(gt, qos).value};
  }
}

}  // namespace

Dataset generate_dataset(const phy::CellConfig& cell, const GenParams& gp,
                         const AppTable& apps, std::span<const Persona> personas,
                         int users_per_persona, std::int64_t duration_s,
                         std::uint64_t seed, bool parallel) {
  if (personas.empty()) throw std::invalid_argument("generate_dataset: no personas");
  if (users_per_persona < 1)
    throw std::invalid_argument("generate_dataset: users_per_persona must be >= 1");
  for (const Persona& p : personas) p.validate();

  std::int64_t count = std::llround(static_cast<double>(duration_s) / gp.ts_len_s);
  int num_users = static_cast<int>(personas.size()) * users_per_persona;

  Dataset ds;
  ds.num_personas = static_cast<int>(personas.size());
  ds.users_per_persona = users_per_persona;
  ds.samples.resize(static_cast<std::size_t>(num_users) * static_cast<std::size_t>(count));

  // Each user's block has a fixed offset, so thread count cannot reorder
  // anything the caller can observe.
  auto run_user = [&](int u) {
    const Persona& persona = personas[static_cast<std::size_t>(u / users_per_persona)];
    std::span<LabeledSample> block(ds.samples.data() +
                                       static_cast<std::size_t>(u) * static_cast<std::size_t>(count),
                                   static_cast<std::size_t>(count));
    fill_user_samples(cell, gp, apps, persona, u, duration_s, seed, block);
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int u = 0; u < num_users; ++u) run_user(u);
  } else {
    for (int u = 0; u < num_users; ++u) run_user(u);
  }
  return ds;
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  std::string buf;
  buf.reserve(1 << 20);
  buf += "user_id,persona_id,ts_index,time_of_day,cell_row,cell_col,x,y,"
         "location_category,speed,application,qos_p_mbps,satisfaction\n";
  for (const LabeledSample& s : ds.samples) {
    buf += std::to_string(s.user_id);
    buf += ',';
    buf += std::to_string(s.persona_id);
    buf += ',';
    buf += std::to_string(s.ctx.ts_index);
    buf += ',';
    textio::append_double(buf, s.ctx.time_of_day_s);
    buf += ',';
    buf += std::to_string(s.ctx.cell.row);
    buf += ',';
    buf += std::to_string(s.ctx.cell.col);
    buf += ',';
    textio::append_double(buf, s.ctx.pos.x);
    buf += ',';
    textio::append_double(buf, s.ctx.pos.y);
    buf += ',';
    buf += to_string(s.ctx.location);
    buf += ',';
    textio::append_double(buf, s.ctx.speed_mps);
    buf += ',';
    buf += to_string(s.ctx.app);
    buf += ',';
    textio::append_double(buf, s.qos_p_mbps);
    buf += ',';
    buf += std::to_string(s.satisfaction);
    buf += '\n';
    if (buf.size() > (1 << 20) - 512) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);

  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);

  std::size_t lineno = 1;
  int max_persona = -1;
  std::vector<int> users_seen;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = textio::trim(line);
    if (sv.empty()) continue;
    auto fields = textio::split(sv, ',');
    if (fields.size() != 13)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 13 fields");

    LabeledSample s;
    s.user_id = static_cast<int>(textio::parse_int(fields[0], "user_id"));
    s.persona_id = static_cast<int>(textio::parse_int(fields[1], "persona_id"));
    s.ctx.ts_index = textio::parse_int(fields[2], "ts_index");
    s.ctx.time_of_day_s = textio::parse_double(fields[3], "time_of_day");
    s.ctx.cell.row = static_cast<int>(textio::parse_int(fields[4], "cell_row"));
    s.ctx.cell.col = static_cast<int>(textio::parse_int(fields[5], "cell_col"));
    s.ctx.pos.x = textio::parse_double(fields[6], "x");
    s.ctx.pos.y = textio::parse_double(fields[7], "y");
    auto loc = parse_location(textio::trim(fields[8]));
    if (!loc)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad location category");
    s.ctx.location = *loc;
    s.ctx.speed_mps = textio::parse_double(fields[9], "speed");
    auto app = parse_application(textio::trim(fields[10]));
    if (!app)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad application");
    s.ctx.app = *app;
    s.qos_p_mbps = textio::parse_double(fields[11], "qos_p_mbps");
    s.satisfaction = static_cast<int>(textio::parse_int(fields[12], "satisfaction"));
    if (s.satisfaction < 1 || s.satisfaction > zot::kLevels)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": satisfaction out of range");

    max_persona = std::max(max_persona, s.persona_id);
    users_seen.push_back(s.user_id);
    ds.samples.push_back(s);
  }
  std::sort(users_seen.begin(), users_seen.end());
  users_seen.erase(std::unique(users_seen.begin(), users_seen.end()), users_seen.end());
  ds.num_personas = max_persona + 1;
  ds.users_per_persona =
      ds.num_personas > 0 ? static_cast<int>(users_seen.size()) / ds.num_personas : 0;
  return ds;
}

}  // namespace persim::synth
