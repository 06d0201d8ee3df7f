#include "persim/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "persim/textio.hpp"

namespace persim::ml {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative/absolute margin a corrective nudge aims past the observed rate.
constexpr double kNudgeRel = 1e-3;
constexpr double kNudgeAbs = 1e-6;

constexpr double kDriftDecay = 0.95;

ThresholdEstimate zero_tolerance(double demand) {
  ThresholdEstimate e;
  e.demand_mbps = demand;
  e.adequate = {0.0, 0.25 * demand, 0.5 * demand, 0.75 * demand, demand};
  e.min_above.fill(kInf);
  e.max_below.fill(0.0);
  return e;
}

template <typename Map, typename Key>
ThresholdEstimate& touch(Map& m, const Key& key, double demand) {
  auto [it, inserted] = m.try_emplace(key);
  if (inserted) {
    it->second.demand_mbps = demand;
    it->second.min_above.fill(kInf);
  }
  return it->second;
}

// Straddle update: record where this labelled sample sits relative to every
// threshold. Level i+1 is reached iff qos_p >= q_a(i+1).
void observe(ThresholdEstimate& e, double qos_p, int sat) {
  for (int i = 1; i < zot::kLevels; ++i) {
    auto idx = static_cast<std::size_t>(i);
    if (sat >= i + 1)
      e.min_above[idx] = std::min(e.min_above[idx], qos_p);
    else
      e.max_below[idx] = std::max(e.max_below[idx], qos_p);
  }
  e.count += 1;
}

double sq(double v) { return v * v; }

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TwoPhaseModel::TwoPhaseModel(FeatureLayout layout, synth::AppTable apps, LearnParams params,
                             int num_personas)
    : layout_(layout), apps_(apps), params_(params), num_personas_(num_personas) {
  if (num_personas < 1) throw std::invalid_argument("model needs at least one persona");
}

void TwoPhaseModel::project(ThresholdEstimate& e) {
  e.adequate[0] = 0.0;
  for (int i = 1; i < zot::kLevels; ++i) {
    auto idx = static_cast<std::size_t>(i);
    e.adequate[idx] = std::clamp(e.adequate[idx], e.adequate[idx - 1], e.demand_mbps);
  }
}

void TwoPhaseModel::refresh_from_straddles(ThresholdEstimate& e) {
  for (int i = 1; i < zot::kLevels; ++i) {
    auto idx = static_cast<std::size_t>(i);
    double lo = e.max_below[idx];
    double hi = std::min(e.min_above[idx], e.demand_mbps);
    e.adequate[idx] = 0.5 * (std::min(lo, hi) + std::max(lo, hi));
  }
  project(e);
}

void TwoPhaseModel::clamp_into_straddles(ThresholdEstimate& e) {
  for (int i = 1; i < zot::kLevels; ++i) {
    auto idx = static_cast<std::size_t>(i);
    double lo = e.max_below[idx];
    double hi = std::min(e.min_above[idx], e.demand_mbps);
    e.adequate[idx] = std::clamp(e.adequate[idx], std::min(lo, hi), std::max(lo, hi));
  }
  project(e);
}

ThresholdEstimate TwoPhaseModel::estimate_for(int persona, synth::LocationCategory loc,
                                              synth::Application app, int phase) const {
  auto it = buckets_.find(
      BucketKey{persona, static_cast<int>(loc), static_cast<int>(app), phase});
  if (it != buckets_.end()) return it->second;
  auto git = globals_.find({persona, static_cast<int>(app)});
  if (git != globals_.end()) return git->second;
  return zero_tolerance(apps_.demand(app));
}

std::vector<double> TwoPhaseModel::predict_persona(const FeatureVector& f) const {
  if (!trained()) throw std::logic_error("model is untrained: no prototypes");
  if (static_cast<int>(f.size()) != layout_.dim())
    throw std::invalid_argument("feature vector has the wrong dimension");

  std::vector<double> dist(static_cast<std::size_t>(num_personas_), kInf);
  for (const auto& [key, proto] : prototypes_) {
    double d = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) d += sq(f[i] - proto.centroid[i]);
    auto p = static_cast<std::size_t>(key.persona);
    dist[p] = std::min(dist[p], d);
  }

  // Shift by the best distance before exponentiating so the winner never
  // underflows; personas with no prototypes get exactly zero weight.
  double best = *std::min_element(dist.begin(), dist.end());
  std::vector<double> c(dist.size(), 0.0);
  double sum = 0.0;
  for (std::size_t p = 0; p < dist.size(); ++p) {
    if (dist[p] == kInf) continue;
    c[p] = std::exp(-(dist[p] - best) / params_.softmax_temp);
    sum += c[p];
  }
  for (double& v : c) v /= sum;
  return c;
}

zot::ZotProfile TwoPhaseModel::predict_profile(const FeatureVector& f,
                                               const std::vector<double>& c,
                                               synth::Application app) const {
  if (static_cast<int>(c.size()) != num_personas_)
    throw std::invalid_argument("persona weight vector has the wrong size");
  double wsum = std::accumulate(c.begin(), c.end(), 0.0);
  if (!(wsum > 0.0)) throw std::invalid_argument("persona weights must sum to > 0");

  synth::LocationCategory loc = location_of(layout_, f);
  int phase = phase_of(layout_, f);
  double demand = apps_.demand(app);

  zot::ZotProfile profile;
  profile.demand_mbps = demand;
  for (int p = 0; p < num_personas_; ++p) {
    double w = c[static_cast<std::size_t>(p)];
    if (w == 0.0) continue;
    ThresholdEstimate e = estimate_for(p, loc, app, phase);
    for (int i = 0; i < zot::kLevels; ++i)
      profile.adequate_mbps[static_cast<std::size_t>(i)] +=
          (w / wsum) * e.adequate[static_cast<std::size_t>(i)];
  }
  profile.adequate_mbps[0] = 0.0;
  for (int i = 1; i < zot::kLevels; ++i) {
    auto idx = static_cast<std::size_t>(i);
    profile.adequate_mbps[idx] =
        std::clamp(profile.adequate_mbps[idx], profile.adequate_mbps[idx - 1], demand);
  }
  return profile;
}

zot::SatisfactionLevel TwoPhaseModel::predict_satisfaction(const FeatureVector& f,
                                                           const std::vector<double>& c,
                                                           synth::Application app,
                                                           double delta_mbps) const {
  zot::ZotProfile profile = predict_profile(f, c, app);
  double delta = std::clamp(delta_mbps, 0.0, profile.demand_mbps);
  return zot::satisfaction_of(profile, profile.demand_mbps - delta);
}

void TwoPhaseModel::online_update(const FeatureVector& f, const std::vector<double>& c,
                                  synth::Application app, double qos_p_mbps,
                                  int measured_sat) {
  if (measured_sat < 1 || measured_sat > zot::kLevels)
    throw std::invalid_argument("measured satisfaction out of range");
  if (!(qos_p_mbps >= 0.0)) throw std::invalid_argument("qos_p must be >= 0");

  double demand = apps_.demand(app);
  double qos = std::min(qos_p_mbps, demand);

  zot::ZotProfile profile = predict_profile(f, c, app);
  int predicted = zot::satisfaction_of(profile, qos).value;

  // The most probable persona owns the correction.
  int persona = argmax(c);
  synth::LocationCategory loc = location_of(layout_, f);
  int phase = phase_of(layout_, f);
  BucketKey key{persona, static_cast<int>(loc), static_cast<int>(app), phase};

  auto it = buckets_.find(key);
  if (it == buckets_.end()) {
    // Seed a fresh bucket from the fallback chain before it can shadow it.
    ThresholdEstimate init = estimate_for(persona, loc, app, phase);
    init.min_above.fill(kInf);
    init.max_below.fill(0.0);
    init.count = 0;
    init.drift_score = 0.0;
    it = buckets_.emplace(key, init).first;
  }
  ThresholdEstimate& b = it->second;

  observe(b, qos, measured_sat);

  if (b.count <= params_.cold_samples) {
    // Young (or freshly reset) bucket: force consistency with everything seen
    // so far instead of creeping toward it.
    clamp_into_straddles(b);
  } else if (predicted != measured_sat) {
    int lo = std::min(predicted, measured_sat);
    int hi = std::max(predicted, measured_sat);
    for (int level = lo + 1; level <= hi; ++level) {
      auto idx = static_cast<std::size_t>(level - 1);
      if (measured_sat < predicted) {
        // Scored too optimistic: these thresholds sit at or below qos, lift
        // them just past it.
        double target = qos * (1.0 + kNudgeRel) + kNudgeAbs;
        if (b.adequate[idx] < target)
          b.adequate[idx] += params_.eta * (target - b.adequate[idx]);
      } else {
        double target = std::max(qos * (1.0 - kNudgeRel) - kNudgeAbs, 0.0);
        if (b.adequate[idx] > target)
          b.adequate[idx] += params_.eta * (target - b.adequate[idx]);
      }
    }
    b.drift_score += 1.0;
    project(b);
  } else {
    // Agreement: decay the drift score and drift toward the straddle
    // midpoints at a tenth of the correction rate.
    ThresholdEstimate mid = b;
    refresh_from_straddles(mid);
    for (int i = 1; i < zot::kLevels; ++i) {
      auto idx = static_cast<std::size_t>(i);
      b.adequate[idx] += (params_.eta / 10.0) * (mid.adequate[idx] - b.adequate[idx]);
    }
    b.drift_score *= kDriftDecay;
    project(b);
  }

  if (b.drift_score > params_.drift_threshold) {
    // The context stopped matching its history: relearn this bucket from
    // scratch. Stale extremes would poison the fresh straddles, so they go too.
    b.min_above.fill(kInf);
    b.max_below.fill(0.0);
    b.count = 0;
    b.drift_score = 0.0;
    drift_resets_ += 1;
  }
  update_count_ += 1;
}

// ---- persistence ----

namespace {

void put(std::string& out, double v) {
  out += ' ';
  textio::append_double(out, v);
}

void put(std::string& out, std::int64_t v) {
  out += ' ';
  out += std::to_string(v);
}

void put(std::string& out, int v) { put(out, static_cast<std::int64_t>(v)); }

void put_estimate(std::string& out, const ThresholdEstimate& e) {
  put(out, e.count);
  put(out, e.drift_score);
  put(out, e.demand_mbps);
  for (double v : e.adequate) put(out, v);
  for (double v : e.min_above) put(out, v);
  for (double v : e.max_below) put(out, v);
}

struct TokenReader {
  std::vector<std::string> tokens;
  std::size_t pos = 0;

  explicit TokenReader(std::istream& in) {
    std::string t;
    while (in >> t) tokens.push_back(t);
  }

  const std::string& next(const char* what) {
    if (pos >= tokens.size())
      throw std::runtime_error(std::string("model file truncated; expected ") + what);
    return tokens[pos++];
  }

  void expect(const char* literal) {
    const std::string& t = next(literal);
    if (t != literal)
      throw std::runtime_error(std::string("model file: expected '") + literal + "', got '" +
                               t + "'");
  }

  double num(const char* what) { return textio::parse_double(next(what), what); }
  std::int64_t integer(const char* what) { return textio::parse_int(next(what), what); }
};

ThresholdEstimate read_estimate(TokenReader& r) {
  ThresholdEstimate e;
  e.count = r.integer("estimate count");
  e.drift_score = r.num("drift score");
  e.demand_mbps = r.num("demand");
  for (double& v : e.adequate) v = r.num("adequate threshold");
  for (double& v : e.min_above) v = r.num("straddle upper");
  for (double& v : e.max_below) v = r.num("straddle lower");
  return e;
}

}  // namespace

void TwoPhaseModel::save(const std::string& path) const {
  std::string out;
  out.reserve(1 << 16);
  out += "persim-model 1\n";
  out += "personas";
  put(out, num_personas_);
  out += "\nphases";
  put(out, layout_.num_phases);
  out += "\napps";
  for (double d : apps_.demand_mbps) put(out, d);
  out += "\nparams";
  put(out, params_.eta);
  put(out, params_.drift_threshold);
  put(out, params_.softmax_temp);
  put(out, params_.holdout_frac);
  put(out, params_.cold_samples);
  put(out, params_.cluster ? 1 : 0);
  put(out, params_.num_clusters);
  out += "\ncounters";
  put(out, update_count_);
  put(out, drift_resets_);
  out += '\n';

  out += "prototypes";
  put(out, static_cast<std::int64_t>(prototypes_.size()));
  out += '\n';
  for (const auto& [key, proto] : prototypes_) {
    out += "P";
    put(out, key.persona);
    put(out, key.location);
    put(out, key.app);
    put(out, key.phase);
    put(out, proto.count);
    put(out, static_cast<std::int64_t>(proto.centroid.size()));
    for (double v : proto.centroid) put(out, v);
    out += '\n';
  }

  out += "buckets";
  put(out, static_cast<std::int64_t>(buckets_.size()));
  out += '\n';
  for (const auto& [key, e] : buckets_) {
    out += "B";
    put(out, key.persona);
    put(out, key.location);
    put(out, key.app);
    put(out, key.phase);
    put_estimate(out, e);
    out += '\n';
  }

  out += "globals";
  put(out, static_cast<std::int64_t>(globals_.size()));
  out += '\n';
  for (const auto& [key, e] : globals_) {
    out += "G";
    put(out, key.first);
    put(out, key.second);
    put_estimate(out, e);
    out += '\n';
  }
  out += "end\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

TwoPhaseModel TwoPhaseModel::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model: " + path);
  TokenReader r(f);

  r.expect("persim-model");
  if (r.next("format version") != "1")
    throw std::runtime_error("unsupported model format version");

  TwoPhaseModel m;
  r.expect("personas");
  m.num_personas_ = static_cast<int>(r.integer("persona count"));
  if (m.num_personas_ < 1) throw std::runtime_error("model file: bad persona count");
  r.expect("phases");
  m.layout_.num_phases = static_cast<int>(r.integer("phase count"));
  if (m.layout_.num_phases < 1) throw std::runtime_error("model file: bad phase count");
  r.expect("apps");
  for (double& d : m.apps_.demand_mbps) d = r.num("app demand");
  r.expect("params");
  m.params_.eta = r.num("eta");
  m.params_.drift_threshold = r.num("drift threshold");
  m.params_.softmax_temp = r.num("softmax temperature");
  m.params_.holdout_frac = r.num("holdout fraction");
  m.params_.cold_samples = static_cast<int>(r.integer("cold samples"));
  m.params_.cluster = r.integer("cluster flag") != 0;
  m.params_.num_clusters = static_cast<int>(r.integer("cluster count"));
  r.expect("counters");
  m.update_count_ = r.integer("update count");
  m.drift_resets_ = r.integer("drift resets");

  r.expect("prototypes");
  std::int64_t np = r.integer("prototype count");
  for (std::int64_t i = 0; i < np; ++i) {
    r.expect("P");
    BucketKey key;
    key.persona = static_cast<int>(r.integer("persona"));
    key.location = static_cast<int>(r.integer("location"));
    key.app = static_cast<int>(r.integer("app"));
    key.phase = static_cast<int>(r.integer("phase"));
    Prototype proto;
    proto.count = r.integer("prototype weight");
    std::int64_t dim = r.integer("prototype dim");
    if (dim != m.layout_.dim())
      throw std::runtime_error("model file: prototype dimension mismatch");
    proto.centroid.resize(static_cast<std::size_t>(dim));
    for (double& v : proto.centroid) v = r.num("centroid value");
    m.prototypes_.emplace(key, std::move(proto));
  }

  r.expect("buckets");
  std::int64_t nb = r.integer("bucket count");
  for (std::int64_t i = 0; i < nb; ++i) {
    r.expect("B");
    BucketKey key;
    key.persona = static_cast<int>(r.integer("persona"));
    key.location = static_cast<int>(r.integer("location"));
    key.app = static_cast<int>(r.integer("app"));
    key.phase = static_cast<int>(r.integer("phase"));
    m.buckets_.emplace(key, read_estimate(r));
  }

  r.expect("globals");
  std::int64_t ng = r.integer("global count");
  for (std::int64_t i = 0; i < ng; ++i) {
    r.expect("G");
    int persona = static_cast<int>(r.integer("persona"));
    int app = static_cast<int>(r.integer("app"));
    m.globals_.emplace(std::make_pair(persona, app), read_estimate(r));
  }
  r.expect("end");
  return m;
}

// ---- offline training ----

std::pair<TwoPhaseModel, TrainReport> train(const synth::Dataset& ds,
                                            const synth::GenParams& gp,
                                            const synth::AppTable& apps,
                                            const LearnParams& lp, std::uint64_t seed) {
  if (ds.samples.empty()) throw std::invalid_argument("train: dataset is empty");
  FeatureLayout layout = layout_for(gp);

  // Label per user: persona from the data, or a discovered cluster.
  std::map<int, int> user_label;
  int num_personas = 0;
  if (lp.cluster) {
    ClusterResult cr = cluster_personas(ds, gp, apps, lp.num_clusters, seed);
    for (std::size_t i = 0; i < cr.user_ids.size(); ++i)
      user_label[cr.user_ids[i]] = cr.user_cluster[i];
    num_personas = lp.num_clusters;
  } else {
    for (const synth::LabeledSample& s : ds.samples) {
      auto [it, inserted] = user_label.try_emplace(s.user_id, s.persona_id);
      if (!inserted && it->second != s.persona_id)
        throw std::invalid_argument("train: user " + std::to_string(s.user_id) +
                                    " has inconsistent persona labels");
      num_personas = std::max(num_personas, s.persona_id + 1);
    }
  }

  // Hold out whole users, the last ones of each label group.
  std::map<int, std::vector<int>> users_by_label;
  for (const auto& [user, label] : user_label) users_by_label[label].push_back(user);
  std::set<int> holdout;
  for (auto& [label, users] : users_by_label) {
    std::sort(users.begin(), users.end());
    int n = static_cast<int>(users.size());
    int h = 0;
    if (n >= 2 && lp.holdout_frac > 0.0)
      h = std::clamp(static_cast<int>(std::llround(lp.holdout_frac * n)), 1, n - 1);
    for (int i = n - h; i < n; ++i) holdout.insert(users[static_cast<std::size_t>(i)]);
  }

  TwoPhaseModel model(layout, apps, lp, num_personas);
  TrainReport report;
  report.num_personas = num_personas;

  for (const synth::LabeledSample& s : ds.samples) {
    if (holdout.count(s.user_id)) continue;
    int label = user_label.at(s.user_id);
    FeatureVector f = preprocess(gp, s.ctx);
    BucketKey key{label, static_cast<int>(s.ctx.location), static_cast<int>(s.ctx.app),
                  synth::day_phase(gp, s.ctx.time_of_day_s)};

    Prototype& proto = model.prototypes_[key];
    if (proto.centroid.empty()) proto.centroid.assign(f.size(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) proto.centroid[i] += f[i];
    proto.count += 1;

    double demand = apps.demand(s.ctx.app);
    observe(touch(model.buckets_, key, demand), s.qos_p_mbps, s.satisfaction);
    observe(touch(model.globals_, std::make_pair(label, static_cast<int>(s.ctx.app)), demand),
            s.qos_p_mbps, s.satisfaction);
    report.train_samples += 1;
  }
  if (report.train_samples == 0)
    throw std::invalid_argument("train: no training samples after the holdout split");

  for (auto& [key, proto] : model.prototypes_)
    for (double& v : proto.centroid) v /= static_cast<double>(proto.count);
  for (auto& [key, e] : model.buckets_) TwoPhaseModel::refresh_from_straddles(e);
  for (auto& [key, e] : model.globals_) TwoPhaseModel::refresh_from_straddles(e);
  report.buckets = static_cast<int>(model.buckets_.size());

  // Held-out evaluation: classification, fitness agreement, and threshold
  // distance against estimates recomputed from the held-out data alone.
  std::map<BucketKey, ThresholdEstimate> ho_buckets;
  std::int64_t phase1_ok = 0;
  std::int64_t fit_ok = 0;
  for (const synth::LabeledSample& s : ds.samples) {
    if (!holdout.count(s.user_id)) continue;
    int label = user_label.at(s.user_id);
    FeatureVector f = preprocess(gp, s.ctx);

    std::vector<double> c = model.predict_persona(f);
    if (argmax(c) == label) phase1_ok += 1;

    zot::ZotProfile profile = model.predict_profile(f, c, s.ctx.app);
    if (zot::satisfaction_of(profile, s.qos_p_mbps).value == s.satisfaction) fit_ok += 1;

    BucketKey key{label, static_cast<int>(s.ctx.location), static_cast<int>(s.ctx.app),
                  synth::day_phase(gp, s.ctx.time_of_day_s)};
    observe(touch(ho_buckets, key, apps.demand(s.ctx.app)), s.qos_p_mbps, s.satisfaction);
    report.holdout_samples += 1;
  }

  if (report.holdout_samples > 0) {
    report.phase1_accuracy =
        static_cast<double>(phase1_ok) / static_cast<double>(report.holdout_samples);
    report.fitness_agreement =
        static_cast<double>(fit_ok) / static_cast<double>(report.holdout_samples);

    double se = 0.0;
    std::int64_t weight = 0;
    for (auto& [key, hb] : ho_buckets) {
      if (hb.count < 50) continue;  // too noisy to say anything about
      auto it = model.buckets_.find(key);
      if (it == model.buckets_.end()) continue;
      TwoPhaseModel::refresh_from_straddles(hb);
      for (int i = 1; i < zot::kLevels; ++i) {
        auto idx = static_cast<std::size_t>(i);
        se += static_cast<double>(hb.count) *
              sq(hb.adequate[idx] - it->second.adequate[idx]);
        weight += hb.count;
      }
    }
    report.phase2_rmse_mbps = weight > 0 ? std::sqrt(se / static_cast<double>(weight)) : 0.0;
  }

  return {std::move(model), report};
}

// ---- persona discovery ----

ClusterResult cluster_personas(const synth::Dataset& ds, const synth::GenParams& gp,
                               const synth::AppTable& apps, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("cluster_personas: k must be >= 1");
  if (ds.samples.empty()) throw std::invalid_argument("cluster_personas: dataset is empty");
  FeatureLayout layout = layout_for(gp);

  // Behaviour aggregate per user: mean context vector plus mean satisfaction
  // in each provided-rate quartile (rate relative to demand).
  struct Agg {
    FeatureVector fsum;
    std::int64_t n = 0;
    std::array<double, 4> sat_sum{};
    std::array<std::int64_t, 4> sat_n{};
  };
  std::map<int, Agg> by_user;
  for (const synth::LabeledSample& s : ds.samples) {
    Agg& a = by_user[s.user_id];
    if (a.fsum.empty()) a.fsum.assign(static_cast<std::size_t>(layout.dim()), 0.0);
    FeatureVector f = preprocess(gp, s.ctx);
    for (std::size_t i = 0; i < f.size(); ++i) a.fsum[i] += f[i];
    a.n += 1;
    double demand = apps.demand(s.ctx.app);
    int quart = std::min(3, static_cast<int>(4.0 * s.qos_p_mbps / demand));
    a.sat_sum[static_cast<std::size_t>(quart)] += s.satisfaction;
    a.sat_n[static_cast<std::size_t>(quart)] += 1;
  }
  int n_users = static_cast<int>(by_user.size());
  if (k > n_users)
    throw std::invalid_argument("cluster_personas: more clusters than users");

  ClusterResult result;
  std::vector<std::vector<double>> points;
  for (const auto& [user, a] : by_user) {
    std::vector<double> p;
    p.reserve(a.fsum.size() + 4);
    for (double v : a.fsum) p.push_back(v / static_cast<double>(a.n));
    for (int q = 0; q < 4; ++q) {
      auto qi = static_cast<std::size_t>(q);
      // Satisfaction scaled to [0, 1]; an unseen quartile sits at neutral.
      p.push_back(a.sat_n[qi] > 0
                      ? a.sat_sum[qi] / (5.0 * static_cast<double>(a.sat_n[qi]))
                      : 0.6);
    }
    points.push_back(std::move(p));
    result.user_ids.push_back(user);
  }

  auto dist2 = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += sq(a[i] - b[i]);
    return d;
  };

  // k-means++ style seeding, then Lloyd iterations with deterministic
  // tie-breaks (lowest centroid index wins).
  KeyedRng rng(seed, Stream::clustering, {});
  std::vector<std::vector<double>> centroids;
  centroids.push_back(points[static_cast<std::size_t>(rng.uniform_int(n_users))]);
  while (static_cast<int>(centroids.size()) < k) {
    std::vector<double> d2(points.size());
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = kInf;
      for (const auto& c : centroids) best = std::min(best, dist2(points[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = rng.next_double() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < d2.size(); ++i) {
        acc += d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.uniform_int(n_users));
    }
    centroids.push_back(points[pick]);
  }

  std::vector<int> assign(points.size(), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      int best = 0;
      double best_d = dist2(points[i], centroids[0]);
      for (int c = 1; c < k; ++c) {
        double d = dist2(points[i], centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best = c;
          best_d = d;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed) break;

    for (int c = 0; c < k; ++c) {
      std::vector<double> sum(points[0].size(), 0.0);
      std::int64_t count = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (assign[i] != c) continue;
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += points[i][j];
        count += 1;
      }
      // An emptied cluster keeps its previous centroid.
      if (count == 0) continue;
      for (double& v : sum) v /= static_cast<double>(count);
      centroids[static_cast<std::size_t>(c)] = std::move(sum);
    }
  }

  result.user_cluster = std::move(assign);
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace persim::ml
