#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "survscore/errors.hpp"
#include "survscore/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = 1;
  std::string data_path;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* c = cmd->add_option("--config", args.config_path, "pipeline config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", args.seed, "master seed (overrides config)");
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--threads", args.threads, "worker threads (results are identical for any count)");
  cmd->add_option("--data", args.data_path, "dataset CSV (overrides config)");
}

survscore::PipelineConfig make_config(const CommonArgs& args) {
  survscore::PipelineConfig cfg;
  if (!args.config_path.empty()) cfg = survscore::load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (!args.data_path.empty()) cfg.data_path = args.data_path;
  return cfg;
}

survscore::RunContext make_context(const CommonArgs& args) {
  return {args.out_dir, args.threads};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"survscore: integer time-to-event risk scores from right-censored data"};
  app.require_subcommand(1);

  CommonArgs rank_args, derive_args, eval_args;
  std::optional<std::uint32_t> derive_m;
  std::string derive_ranking, eval_card;
  std::optional<std::uint32_t> rank_trees;

  auto* rank = app.add_subcommand("rank", "rank variables with a random survival forest");
  add_common(rank, rank_args, true);
  rank->add_option("--trees", rank_trees, "number of trees (overrides config)");

  auto* derive = app.add_subcommand("derive", "derive a scorecard (parsimony sweep + weighting)");
  add_common(derive, derive_args, true);
  derive->add_option("--m", derive_m, "number of variables (overrides config)");
  derive->add_option("--ranking", derive_ranking, "reuse a ranking.csv instead of growing a forest");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a scorecard on the test split");
  add_common(evaluate, eval_args, true);
  evaluate->add_option("--card", eval_card, "scorecard file (.json or .csv; overrides config)");

  std::string score_card, score_patients, score_out = "scores.csv";
  auto* score = app.add_subcommand("score", "apply a scorecard to a patients CSV");
  score->add_option("--card", score_card, "scorecard file")->required();
  score->add_option("--patients", score_patients, "patients CSV")->required();
  score->add_option("--out", score_out, "output CSV");

  survscore::SynthSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark cohort");
  synth->add_option("--out", synth_out, "output CSV")->required();
  synth->add_option("--n", synth_spec.n, "rows");
  synth->add_option("--coefs", synth_spec.normal_coefs, "log hazard ratios of N(0,1) covariates")
      ->delimiter(',');
  synth->add_option("--binary-coefs", synth_spec.binary_coefs,
                    "log hazard ratios of Bernoulli(0.5) covariates")
      ->delimiter(',');
  synth->add_option("--noise", synth_spec.n_noise_normal, "count of N(0,1) noise covariates");
  synth->add_option("--noise-categorical", synth_spec.n_noise_categorical,
                    "count of 3-level categorical noise covariates");
  synth->add_option("--baseline-rate", synth_spec.baseline_rate, "baseline hazard rate");
  synth->add_option("--weibull-shape", synth_spec.weibull_shape, "Weibull shape (1 = exponential)");
  synth->add_option("--censor-rate", synth_spec.censor_rate, "exponential censoring rate");
  synth->add_option("--seed", synth_spec.seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rank->parsed()) {
      auto cfg = make_config(rank_args);
      if (rank_trees) cfg.forest.n_trees = *rank_trees;
      survscore::cmd_rank(cfg, make_context(rank_args));
    } else if (derive->parsed()) {
      auto cfg = make_config(derive_args);
      if (derive_m) cfg.m = *derive_m;
      if (!derive_ranking.empty()) cfg.ranking_path = derive_ranking;
      survscore::cmd_derive(cfg, make_context(derive_args));
    } else if (evaluate->parsed()) {
      auto cfg = make_config(eval_args);
      if (!eval_card.empty()) cfg.card_path = eval_card;
      survscore::cmd_evaluate(cfg, make_context(eval_args));
    } else if (score->parsed()) {
      survscore::cmd_score(score_card, score_patients, score_out);
    } else if (synth->parsed()) {
      survscore::cmd_synth(synth_spec, synth_out);
    }
  } catch (const survscore::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const survscore::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const survscore::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
