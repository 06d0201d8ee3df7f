#include "persim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "persim/features.hpp"
#include "persim/textio.hpp"

namespace persim::sim {

using nlohmann::json;

std::string to_string(alloc::PolicyKind k) {
  return k == alloc::PolicyKind::personalized ? "personalized" : "baseline";
}

alloc::PolicyKind parse_policy(std::string_view s) {
  if (s == "personalized") return alloc::PolicyKind::personalized;
  if (s == "baseline") return alloc::PolicyKind::baseline;
  throw std::invalid_argument("unknown policy '" + std::string(s) + "'");
}

DevResult run_development(const Config& cfg, std::uint64_t seed, bool parallel) {
  cfg.validate();
  auto dataset =
      synth::generate_dataset(cfg.cell, cfg.synth, cfg.apps, cfg.personas,
                              cfg.gen.users_per_persona, cfg.gen.duration_s, seed, parallel);
  auto [model, report] = ml::train(dataset, cfg.synth, cfg.apps, cfg.learn, seed);
  return DevResult{std::move(dataset), std::move(model), report};
}

RunResult run_production(const Config& cfg, alloc::PolicyKind policy,
                         const ml::TwoPhaseModel* model, std::uint64_t seed,
                         const DriftEvent* drift) {
  cfg.validate();
  const bool personalized = policy == alloc::PolicyKind::personalized;
  const auto layout = ml::layout_for(cfg.synth);
  ml::TwoPhaseModel live;
  if (personalized) {
    if (!model || !model->trained())
      throw std::invalid_argument("personalized policy requires a trained model");
    if (!(model->layout() == layout))
      throw std::invalid_argument("model feature layout does not match the config");
    live = *model;  // adapts locally; the caller's model is untouched
  }

  const int n = static_cast<int>(cfg.sim.user_personas.size());
  const int num_rbs = cfg.cell.num_rbs;
  const double ts_len = cfg.sim.ts_len_s;
  const std::int64_t steps =
      std::llround(static_cast<double>(cfg.sim.duration_s) / ts_len);
  const zot::SatisfactionLevel s_min{cfg.sim.s_min};
  const alloc::PlanningPolicy plan{policy, s_min};

  std::vector<std::vector<synth::ContextRecord>> traces;
  traces.reserve(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    const auto& persona = cfg.personas[static_cast<std::size_t>(cfg.sim.user_personas[u])];
    traces.push_back(
        synth::generate_trace(cfg.cell, cfg.synth, persona, u, cfg.sim.duration_s, seed));
  }
  // The oracle's view of the personas; a drift event edits only this copy.
  std::vector<synth::Persona> oracle = cfg.personas;

  RunResult run;
  run.records.reserve(static_cast<std::size_t>(steps) * static_cast<std::size_t>(n));

  alloc::RateTable rates{n, num_rbs,
                         std::vector<double>(static_cast<std::size_t>(n) *
                                             static_cast<std::size_t>(num_rbs))};
  std::vector<phy::RbState> rb_scratch(static_cast<std::size_t>(num_rbs));
  std::vector<alloc::UserTarget> targets(static_cast<std::size_t>(n));
  std::vector<double> deltas(static_cast<std::size_t>(n));
  std::vector<ml::FeatureVector> feats(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(n));
  std::vector<zot::ZotProfile> profiles(static_cast<std::size_t>(n));

  for (std::int64_t ts = 0; ts < steps; ++ts) {
    if (drift && ts == drift->at_ts && drift->persona_id >= 0 &&
        drift->persona_id < static_cast<int>(oracle.size())) {
      auto& p = oracle[static_cast<std::size_t>(drift->persona_id)];
      p.tolerance_default = drift->new_tolerance_default;
      if (drift->clear_overrides) p.tolerance_by_context.clear();
    }

    for (int u = 0; u < n; ++u) {
      const auto& ctx = traces[static_cast<std::size_t>(u)][static_cast<std::size_t>(ts)];
      phy::sample_channel(cfg.cell, seed, u, ts, ctx.pos, rb_scratch);
      for (int r = 0; r < num_rbs; ++r)
        rates.rate_mbps[static_cast<std::size_t>(u) * static_cast<std::size_t>(num_rbs) +
                        static_cast<std::size_t>(r)] =
            rb_scratch[static_cast<std::size_t>(r)].rate_mbps;

      const double demand = cfg.apps.demand(ctx.app);
      double target = demand;
      double delta_opt = 0.0;
      if (personalized) {
        auto& f = feats[static_cast<std::size_t>(u)];
        f = ml::preprocess(cfg.synth, ctx);
        weights[static_cast<std::size_t>(u)] = live.predict_persona(f);
        profiles[static_cast<std::size_t>(u)] =
            live.predict_profile(f, weights[static_cast<std::size_t>(u)], ctx.app);
        delta_opt = alloc::optimize_delta(profiles[static_cast<std::size_t>(u)], s_min);
        target = alloc::target_rate(plan, profiles[static_cast<std::size_t>(u)], demand);
      }
      targets[static_cast<std::size_t>(u)] = {target, demand};
      deltas[static_cast<std::size_t>(u)] = delta_opt;
    }

    const auto decisions = alloc::allocate_rbs(targets, rates);

    for (int u = 0; u < n; ++u) {
      const auto& ctx = traces[static_cast<std::size_t>(u)][static_cast<std::size_t>(ts)];
      const auto& dec = decisions[static_cast<std::size_t>(u)];
      const double demand = targets[static_cast<std::size_t>(u)].demand_mbps;
      const double qos_p = std::min(dec.achieved_mbps, demand);
      const auto& persona =
          oracle[static_cast<std::size_t>(cfg.sim.user_personas[static_cast<std::size_t>(u)])];
      const auto truth = synth::ground_truth_profile(cfg.synth, cfg.apps, persona, ctx, seed);
      const int sat_meas = zot::satisfaction_of(truth, qos_p).value;

      int sat_pred = zot::kLevels;  // the baseline plans for full demand
      if (personalized) {
        sat_pred = live.predict_satisfaction(feats[static_cast<std::size_t>(u)],
                                             weights[static_cast<std::size_t>(u)], ctx.app,
                                             demand - qos_p)
                       .value;
        live.online_update(feats[static_cast<std::size_t>(u)],
                           weights[static_cast<std::size_t>(u)], ctx.app, qos_p, sat_meas);
      }

      TsRecord rec;
      rec.ts_index = ts;
      rec.user_id = u;
      rec.policy = policy;
      rec.app = ctx.app;
      rec.location = ctx.location;
      rec.delta_opt_mbps = deltas[static_cast<std::size_t>(u)];
      rec.target_mbps = targets[static_cast<std::size_t>(u)].target_mbps;
      rec.rbs_used = static_cast<int>(dec.rbs.size());
      rec.qos_p_mbps = qos_p;
      rec.sat_pred = sat_pred;
      rec.sat_meas = sat_meas;
      rec.correct = sat_pred == sat_meas;
      rec.feasible = dec.feasible;
      run.records.push_back(rec);
    }
  }

  auto& s = run.summary;
  s.policy = to_string(policy);
  s.seed = seed;
  s.config_digest = config_digest(cfg);
  s.duration_s = cfg.sim.duration_s;
  s.ts_len_s = ts_len;
  s.num_users = n;
  s.warmup_s = cfg.sim.warmup_s;
  s.num_records = static_cast<std::int64_t>(run.records.size());
  s.app_demand_mbps = cfg.apps.demand_mbps;

  std::vector<double> user_sat(static_cast<std::size_t>(n), 0.0);
  std::vector<std::int64_t> user_cnt(static_cast<std::size_t>(n), 0);
  double sat_all = 0.0, sat_warm = 0.0;
  std::int64_t warm_rows = 0, wrong = 0;
  for (const auto& r : run.records) {
    const double t = static_cast<double>(r.ts_index) * ts_len;
    const double mbits = r.qos_p_mbps * ts_len;
    s.total_provided_mbits += mbits;
    s.total_demand_mbits += s.app_demand_mbps[static_cast<std::size_t>(r.app)] * ts_len;
    sat_all += r.sat_meas;
    if (!r.correct) ++wrong;
    if (!r.feasible) ++s.infeasible_user_slots;
    if (t >= cfg.sim.warmup_s) {
      s.total_provided_mbits_after_warmup += mbits;
      sat_warm += r.sat_meas;
      ++warm_rows;
      user_sat[static_cast<std::size_t>(r.user_id)] += r.sat_meas;
      ++user_cnt[static_cast<std::size_t>(r.user_id)];
    }
  }
  if (!run.records.empty()) {
    s.avg_satisfaction = sat_all / static_cast<double>(run.records.size());
    s.misprediction_rate =
        static_cast<double>(wrong) / static_cast<double>(run.records.size());
  }
  if (warm_rows > 0) s.avg_satisfaction_after_warmup = sat_warm / static_cast<double>(warm_rows);
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int u = 0; u < n; ++u) {
    if (user_cnt[static_cast<std::size_t>(u)] == 0) continue;
    const double avg = user_sat[static_cast<std::size_t>(u)] /
                       static_cast<double>(user_cnt[static_cast<std::size_t>(u)]);
    if (first || avg < lo) lo = avg;
    if (first || avg > hi) hi = avg;
    first = false;
  }
  s.min_user_avg_satisfaction = lo;
  s.max_user_avg_satisfaction = hi;
  return run;
}

ComparisonReport compare(const RunResult& personalized, const RunResult& baseline) {
  if (personalized.records.size() != baseline.records.size())
    throw std::invalid_argument("runs have different record counts");
  if (personalized.summary.config_digest != baseline.summary.config_digest)
    throw std::invalid_argument("runs come from different configs");

  const double ts_len = baseline.summary.ts_len_s;
  const double warmup = baseline.summary.warmup_s;
  const int hours = std::max(
      1, static_cast<int>((baseline.summary.duration_s + 3599) / 3600));

  ComparisonReport rep;
  rep.hourly.resize(static_cast<std::size_t>(hours));
  for (int h = 0; h < hours; ++h) rep.hourly[static_cast<std::size_t>(h)].hour = h;
  std::vector<std::int64_t> hour_rows(static_cast<std::size_t>(hours), 0);

  bool contexts_agree = true;
  double sat_b = 0.0, sat_p = 0.0, sat_b_warm = 0.0, sat_p_warm = 0.0;
  std::int64_t warm_rows = 0;
  for (std::size_t i = 0; i < baseline.records.size(); ++i) {
    const auto& b = baseline.records[i];
    const auto& p = personalized.records[i];
    if (b.ts_index != p.ts_index || b.user_id != p.user_id || b.app != p.app ||
        b.location != p.location)
      contexts_agree = false;

    const double t = static_cast<double>(b.ts_index) * ts_len;
    const int h = std::clamp(static_cast<int>(t / 3600.0), 0, hours - 1);
    auto& row = rep.hourly[static_cast<std::size_t>(h)];
    const double demand =
        baseline.summary.app_demand_mbps[static_cast<std::size_t>(b.app)] * ts_len;
    row.demand_mbits += demand;
    row.baseline_mbits += b.qos_p_mbps * ts_len;
    row.personalized_mbits += p.qos_p_mbps * ts_len;
    row.baseline_avg_sat += b.sat_meas;
    row.personalized_avg_sat += p.sat_meas;
    ++hour_rows[static_cast<std::size_t>(h)];

    rep.demand_total_mbits += demand;
    rep.baseline_total_mbits += b.qos_p_mbps * ts_len;
    rep.personalized_total_mbits += p.qos_p_mbps * ts_len;
    sat_b += b.sat_meas;
    sat_p += p.sat_meas;
    if (t >= warmup) {
      sat_b_warm += b.sat_meas;
      sat_p_warm += p.sat_meas;
      ++warm_rows;
    }
  }

  for (int h = 0; h < hours; ++h) {
    auto& row = rep.hourly[static_cast<std::size_t>(h)];
    row.saved_mbits = row.baseline_mbits - row.personalized_mbits;
    const auto cnt = hour_rows[static_cast<std::size_t>(h)];
    if (cnt > 0) {
      row.baseline_avg_sat /= static_cast<double>(cnt);
      row.personalized_avg_sat /= static_cast<double>(cnt);
    }
  }
  rep.saved_total_mbits = rep.baseline_total_mbits - rep.personalized_total_mbits;
  if (rep.baseline_total_mbits > 0.0)
    rep.saved_frac_of_baseline = rep.saved_total_mbits / rep.baseline_total_mbits;
  const auto rows = static_cast<double>(baseline.records.size());
  if (rows > 0) {
    rep.baseline_avg_sat = sat_b / rows;
    rep.personalized_avg_sat = sat_p / rows;
  }
  if (warm_rows > 0) {
    rep.baseline_avg_sat_after_warmup = sat_b_warm / static_cast<double>(warm_rows);
    rep.personalized_avg_sat_after_warmup = sat_p_warm / static_cast<double>(warm_rows);
  }
  rep.context_match = contexts_agree;
  return rep;
}

namespace {

constexpr const char* kResultsHeader =
    "ts_index,user_id,policy,application,location_category,delta_opt_mbps,target_mbps,"
    "rbs_used,qos_p_mbps,sat_pred,sat_meas,correct";

void flush_chunk(std::ofstream& out, std::string& buf, std::size_t limit) {
  if (buf.size() >= limit) {
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
  }
}

}  // namespace

void write_results_csv(const std::string& path, const RunResult& run) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  std::string buf;
  buf.reserve(1 << 20);
  buf += kResultsHeader;
  buf += '\n';
  for (const auto& r : run.records) {
    buf += std::to_string(r.ts_index);
    buf += ',';
    buf += std::to_string(r.user_id);
    buf += ',';
    buf += to_string(r.policy);
    buf += ',';
    buf += synth::to_string(r.app);
    buf += ',';
    buf += synth::to_string(r.location);
    buf += ',';
    textio::append_double(buf, r.delta_opt_mbps);
    buf += ',';
    textio::append_double(buf, r.target_mbps);
    buf += ',';
    buf += std::to_string(r.rbs_used);
    buf += ',';
    textio::append_double(buf, r.qos_p_mbps);
    buf += ',';
    buf += std::to_string(r.sat_pred);
    buf += ',';
    buf += std::to_string(r.sat_meas);
    buf += ',';
    buf += r.correct ? '1' : '0';
    buf += '\n';
    flush_chunk(out, buf, 1 << 20);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::vector<TsRecord> read_results_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (textio::trim(line) != kResultsHeader)
    throw std::runtime_error(path + ": unexpected header");

  std::vector<TsRecord> records;
  std::int64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = textio::trim(line);
    if (text.empty()) continue;
    const auto fields = textio::split(text, ',');
    if (fields.size() != 12)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 12 fields");
    try {
      TsRecord r;
      r.ts_index = textio::parse_int(fields[0]);
      r.user_id = static_cast<int>(textio::parse_int(fields[1]));
      r.policy = parse_policy(fields[2]);
      const auto app = synth::parse_application(fields[3]);
      const auto loc = synth::parse_location(fields[4]);
      if (!app || !loc) throw std::runtime_error("bad application or location");
      r.app = *app;
      r.location = *loc;
      r.delta_opt_mbps = textio::parse_double(fields[5]);
      r.target_mbps = textio::parse_double(fields[6]);
      r.rbs_used = static_cast<int>(textio::parse_int(fields[7]));
      r.qos_p_mbps = textio::parse_double(fields[8]);
      r.sat_pred = static_cast<int>(textio::parse_int(fields[9]));
      r.sat_meas = static_cast<int>(textio::parse_int(fields[10]));
      r.correct = textio::parse_int(fields[11]) != 0;
      records.push_back(r);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

void write_summary_json(const std::string& path, const RunSummary& s) {
  json j;
  j["policy"] = s.policy;
  j["seed"] = s.seed;
  j["config_digest"] = s.config_digest;
  j["duration_s"] = s.duration_s;
  j["ts_len_s"] = s.ts_len_s;
  j["num_users"] = s.num_users;
  j["warmup_s"] = s.warmup_s;
  j["num_records"] = s.num_records;
  j["total_provided_mbits"] = s.total_provided_mbits;
  j["total_provided_mbits_after_warmup"] = s.total_provided_mbits_after_warmup;
  j["total_demand_mbits"] = s.total_demand_mbits;
  j["avg_satisfaction"] = s.avg_satisfaction;
  j["avg_satisfaction_after_warmup"] = s.avg_satisfaction_after_warmup;
  j["min_user_avg_satisfaction"] = s.min_user_avg_satisfaction;
  j["max_user_avg_satisfaction"] = s.max_user_avg_satisfaction;
  j["infeasible_user_slots"] = s.infeasible_user_slots;
  j["misprediction_rate"] = s.misprediction_rate;
  j["app_demand_mbps"] = s.app_demand_mbps;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

RunSummary read_summary_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    RunSummary s;
    s.policy = j.at("policy").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.config_digest = j.at("config_digest").get<std::uint64_t>();
    s.duration_s = j.at("duration_s").get<std::int64_t>();
    s.ts_len_s = j.at("ts_len_s").get<double>();
    s.num_users = j.at("num_users").get<int>();
    s.warmup_s = j.at("warmup_s").get<double>();
    s.num_records = j.at("num_records").get<std::int64_t>();
    s.total_provided_mbits = j.at("total_provided_mbits").get<double>();
    s.total_provided_mbits_after_warmup =
        j.at("total_provided_mbits_after_warmup").get<double>();
    s.total_demand_mbits = j.at("total_demand_mbits").get<double>();
    s.avg_satisfaction = j.at("avg_satisfaction").get<double>();
    s.avg_satisfaction_after_warmup = j.at("avg_satisfaction_after_warmup").get<double>();
    s.min_user_avg_satisfaction = j.at("min_user_avg_satisfaction").get<double>();
    s.max_user_avg_satisfaction = j.at("max_user_avg_satisfaction").get<double>();
    s.infeasible_user_slots = j.at("infeasible_user_slots").get<std::int64_t>();
    s.misprediction_rate = j.at("misprediction_rate").get<double>();
    const auto demands = j.at("app_demand_mbps");
    if (!demands.is_array() || demands.size() != s.app_demand_mbps.size())
      throw std::runtime_error("app_demand_mbps must list all application classes");
    for (std::size_t i = 0; i < s.app_demand_mbps.size(); ++i)
      s.app_demand_mbps[i] = demands[i].get<double>();
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_comparison_report(const std::string& dir, const ComparisonReport& rep) {
  std::filesystem::create_directories(dir);

  json j;
  j["demand_total_mbits"] = rep.demand_total_mbits;
  j["baseline_total_mbits"] = rep.baseline_total_mbits;
  j["personalized_total_mbits"] = rep.personalized_total_mbits;
  j["saved_total_mbits"] = rep.saved_total_mbits;
  j["saved_frac_of_baseline"] = rep.saved_frac_of_baseline;
  j["baseline_avg_sat"] = rep.baseline_avg_sat;
  j["personalized_avg_sat"] = rep.personalized_avg_sat;
  j["baseline_avg_sat_after_warmup"] = rep.baseline_avg_sat_after_warmup;
  j["personalized_avg_sat_after_warmup"] = rep.personalized_avg_sat_after_warmup;
  j["context_match"] = rep.context_match;
  const auto report_path = dir + "/report.json";
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + report_path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write to " + report_path + " failed");

  const auto hourly_path = dir + "/hourly.csv";
  std::ofstream hv(hourly_path, std::ios::binary);
  if (!hv) throw std::runtime_error("cannot open " + hourly_path + " for writing");
  std::string buf =
      "hour,demand_mbits,baseline_mbits,personalized_mbits,saved_mbits,"
      "baseline_avg_sat,personalized_avg_sat\n";
  for (const auto& row : rep.hourly) {
    buf += std::to_string(row.hour);
    buf += ',';
    textio::append_double(buf, row.demand_mbits);
    buf += ',';
    textio::append_double(buf, row.baseline_mbits);
    buf += ',';
    textio::append_double(buf, row.personalized_mbits);
    buf += ',';
    textio::append_double(buf, row.saved_mbits);
    buf += ',';
    textio::append_double(buf, row.baseline_avg_sat);
    buf += ',';
    textio::append_double(buf, row.personalized_avg_sat);
    buf += '\n';
  }
  hv.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!hv) throw std::runtime_error("write to " + hourly_path + " failed");
}

}  // namespace persim::sim
