#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "persim/config.hpp"
#include "persim/pipeline.hpp"
#include "persim/predictor.hpp"
#include "persim/synth.hpp"

namespace {

persim::Config load_or_default(const std::string& path) {
  if (path.empty()) return persim::default_config();
  return persim::load_config(path);
}

int cmd_gen_data(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out) {
  const auto cfg = load_or_default(config_path);
  const std::uint64_t s = seed.value_or(cfg.sim.seed);
  const auto ds = persim::synth::generate_dataset(cfg.cell, cfg.synth, cfg.apps, cfg.personas,
                                                  cfg.gen.users_per_persona, cfg.gen.duration_s,
                                                  s, true);
  persim::synth::write_dataset_csv(out, ds);
  std::printf("gen-data: %zu samples, %d personas x %d users, seed %llu -> %s\n",
              ds.samples.size(), ds.num_personas, ds.users_per_persona,
              static_cast<unsigned long long>(s), out.c_str());
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& config_path,
              std::optional<std::uint64_t> seed, const std::string& out) {
  const auto cfg = load_or_default(config_path);
  const auto ds = persim::synth::read_dataset_csv(data_path);
  const std::uint64_t s = seed.value_or(cfg.sim.seed);
  auto [model, report] = persim::ml::train(ds, cfg.synth, cfg.apps, cfg.learn, s);
  model.save(out);
  std::printf("train: %lld train / %lld holdout samples, %d personas, %d buckets -> %s\n",
              static_cast<long long>(report.train_samples),
              static_cast<long long>(report.holdout_samples), report.num_personas,
              report.buckets, out.c_str());
  std::printf("train: persona accuracy %.4f, threshold rmse %.4f Mb/s, fitness agreement %.4f\n",
              report.phase1_accuracy, report.phase2_rmse_mbps, report.fitness_agreement);
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& model_path,
                 const std::string& policy, std::optional<std::uint64_t> seed,
                 const std::string& out_dir) {
  const auto cfg = load_or_default(config_path);
  const auto kind = persim::sim::parse_policy(policy);
  std::optional<persim::ml::TwoPhaseModel> model;
  if (kind == persim::alloc::PolicyKind::personalized) {
    if (model_path.empty())
      throw std::runtime_error("--model is required for the personalized policy");
    model = persim::ml::TwoPhaseModel::load(model_path);
  }
  const std::uint64_t s = seed.value_or(cfg.sim.seed);
  const auto run = persim::sim::run_production(cfg, kind, model ? &*model : nullptr, s);
  std::filesystem::create_directories(out_dir);
  persim::sim::write_results_csv(out_dir + "/results.csv", run);
  persim::sim::write_summary_json(out_dir + "/summary.json", run.summary);
  std::printf("simulate: %s, seed %llu, %lld records -> %s\n", run.summary.policy.c_str(),
              static_cast<unsigned long long>(s),
              static_cast<long long>(run.summary.num_records), out_dir.c_str());
  std::printf("simulate: provided %.1f Mbit, avg satisfaction %.3f (%.3f after warm-up), "
              "%lld infeasible user-slots\n",
              run.summary.total_provided_mbits, run.summary.avg_satisfaction,
              run.summary.avg_satisfaction_after_warmup,
              static_cast<long long>(run.summary.infeasible_user_slots));
  return 0;
}

persim::sim::RunResult load_run(const std::string& dir) {
  persim::sim::RunResult run;
  run.records = persim::sim::read_results_csv(dir + "/results.csv");
  run.summary = persim::sim::read_summary_json(dir + "/summary.json");
  return run;
}

int cmd_compare(const std::string& personalized_dir, const std::string& baseline_dir,
                const std::string& out_dir) {
  const auto pr = load_run(personalized_dir);
  const auto np = load_run(baseline_dir);
  const auto rep = persim::sim::compare(pr, np);
  persim::sim::write_comparison_report(out_dir, rep);
  std::printf("compare: baseline %.1f Mbit, personalized %.1f Mbit, saved %.1f Mbit (%.1f%%)\n",
              rep.baseline_total_mbits, rep.personalized_total_mbits, rep.saved_total_mbits,
              100.0 * rep.saved_frac_of_baseline);
  std::printf("compare: avg satisfaction %.3f baseline vs %.3f personalized -> %s\n",
              rep.baseline_avg_sat, rep.personalized_avg_sat, out_dir.c_str());
  if (!rep.context_match)
    std::fprintf(stderr, "warning: paired rows disagree on context; runs are not a seed pair\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-loop simulator for tolerance-aware wireless resource allocation"};
  app.require_subcommand(1);

  std::string config_path, data_path, model_path, out;
  std::string policy;
  std::string personalized_dir, baseline_dir;
  std::optional<std::uint64_t> seed;

  auto* gen = app.add_subcommand("gen-data", "synthesize a labelled development dataset");
  gen->add_option("--config", config_path, "config file (built-in defaults if omitted)");
  gen->add_option("--seed", seed, "RNG seed (default: sim.seed from the config)");
  gen->add_option("--out", out, "output dataset CSV")->required();

  auto* train = app.add_subcommand("train", "fit the two-phase model from a dataset");
  train->add_option("--data", data_path, "dataset CSV from gen-data")->required();
  train->add_option("--config", config_path, "config file (built-in defaults if omitted)");
  train->add_option("--seed", seed, "RNG seed (default: sim.seed from the config)");
  train->add_option("--out", out, "output model file")->required();

  auto* simulate = app.add_subcommand("simulate", "run one closed-loop day");
  simulate->add_option("--config", config_path, "config file (built-in defaults if omitted)");
  simulate->add_option("--model", model_path, "trained model (personalized policy only)");
  simulate->add_option("--policy", policy, "personalized or baseline")
      ->required()
      ->check(CLI::IsMember({"personalized", "baseline"}));
  simulate->add_option("--seed", seed, "RNG seed (default: sim.seed from the config)");
  simulate->add_option("--out", out, "output directory for results.csv + summary.json")
      ->required();

  auto* compare = app.add_subcommand("compare", "pair two runs and report saved resources");
  compare->add_option("--personalized", personalized_dir, "personalized run directory")
      ->required();
  compare->add_option("--baseline", baseline_dir, "baseline run directory")->required();
  compare->add_option("--out", out, "output directory for report.json + hourly.csv")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(config_path, seed, out);
    if (train->parsed()) return cmd_train(data_path, config_path, seed, out);
    if (simulate->parsed()) return cmd_simulate(config_path, model_path, policy, seed, out);
    if (compare->parsed()) return cmd_compare(personalized_dir, baseline_dir, out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
