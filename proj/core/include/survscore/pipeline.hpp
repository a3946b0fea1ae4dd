#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survscore/dataset.hpp"
#include "survscore/forest.hpp"
#include "survscore/nonparametric.hpp"
#include "survscore/parsimony.hpp"
#include "survscore/synth.hpp"

namespace survscore {

/// Aggregates every module's knobs. All randomness flows from `seed` through
/// fixed per-module derivation paths.
struct PipelineConfig {
  std::string data_path;
  std::string time_col = "time";
  std::string status_col = "status";
  std::map<std::string, ColumnKind> schema; // empty = infer from the file
  MissingPolicy missing = MissingPolicy::reject;

  std::array<double, 3> ratios = {0.7, 0.1, 0.2};
  ForestParams forest; // forest.seed is overwritten with the master seed

  std::vector<double> quantiles = {0.05, 0.20, 0.80, 0.95};
  std::optional<std::uint32_t> m;
  SelectionPolicy selection = SelectionPolicy::manual;
  double epsilon = 0.005;
  std::optional<std::uint32_t> m_max;
  std::vector<std::pair<std::string, std::vector<double>>> cutoff_overrides;

  std::vector<double> evaluation_times;
  std::optional<double> horizon; // default: max event time in the test split
  std::vector<double> strata_edges = {20, 30, 40, 50, 60};
  std::uint32_t bootstrap_resamples = 100;
  double bootstrap_level = 0.95;

  std::uint64_t seed = 0;
  std::string card_path;    // evaluate: scorecard to load
  std::string ranking_path; // derive: reuse a precomputed ranking
};

PipelineConfig load_config(const std::string& path);

/// Hash of the canonical config serialization; stamped on every output file.
std::string config_hash(const PipelineConfig& cfg);

struct RunContext {
  std::string out_dir = ".";
  int threads = 1;
};

/// Table-3-style risk strata: per score interval, cohort share, percentile
/// survival times and survival probabilities at the evaluation times.
struct RiskStrataReport {
  struct Stratum {
    std::string label;
    std::size_t n = 0;
    double percent = 0.0;
    std::optional<double> p10, p25, median; // nullopt = beyond follow-up
    std::vector<double> survival_at;
    KMCurve km;
  };
  std::vector<Stratum> strata;
  std::optional<LogRankResult> logrank; // across nonempty strata
};

/// rank: grow the forest on the training split and write ranking.csv.
void cmd_rank(const PipelineConfig& cfg, const RunContext& ctx);

/// derive: ranking (inline or loaded), parsimony sweep, model selection,
/// cutoff fine-tuning; writes parsimony.csv, scorecard.csv, scorecard.json.
void cmd_derive(const PipelineConfig& cfg, const RunContext& ctx);

/// evaluate: scores the test split; writes metrics.json (with bootstrap
/// CIs), strata.csv and per-stratum KM curves.
void cmd_evaluate(const PipelineConfig& cfg, const RunContext& ctx);

/// score: one integer score per patient row; writes a scores CSV.
void cmd_score(const std::string& card_path, const std::string& patients_path,
               const std::string& out_path);

/// synth: seeded synthetic cohort CSV plus a ground-truth sidecar.
void cmd_synth(const SynthSpec& spec, const std::string& out_path);

} // namespace survscore
