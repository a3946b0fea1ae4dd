#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survscore/dataset.hpp"
#include "survscore/step_function.hpp"

namespace survscore {

struct ForestParams {
  std::uint32_t n_trees = 500;
  std::uint32_t mtry = 0;              // 0 = floor(sqrt(p))
  std::uint32_t min_node_size = 15;    // rows (with bootstrap multiplicity)
  std::uint32_t min_node_events = 3;   // per child, for an admissible split
  std::uint32_t max_depth = 0;         // 0 = unlimited
  std::uint32_t max_candidate_cuts = 0; // 0 = all midpoints; else quantile-thinned
  std::uint64_t seed = 0;
  bool bootstrap = true; // disabled: every tree trains on all rows, no OOB
};

struct TreeNode {
  std::int32_t var = -1; // -1 = leaf
  double threshold = 0.0;        // continuous: left iff x < threshold
  std::int32_t label_code = -1;  // categorical: left iff code == label_code
  std::int32_t left = -1;
  std::int32_t right = -1;
  bool majority_left = false; // larger child at growth time; routing for unseen labels
  std::int32_t leaf = -1;     // index into leaf_chfs when var == -1
};

struct SurvivalTree {
  std::vector<TreeNode> nodes;
  std::vector<StepFunction> leaf_chfs;      // node Nelson-Aalen CHFs
  std::vector<double> leaf_mortality;       // sum of CHF over the forest event grid
  std::vector<std::uint32_t> inbag_rows;    // bootstrap multiset (draw order)
  std::vector<std::uint32_t> oob_rows;      // sorted, unique
};

struct SplitConstraints {
  std::uint32_t min_node_size = 15;
  std::uint32_t min_node_events = 3;
  std::uint32_t max_candidate_cuts = 0;
};

struct SplitChoice {
  std::uint32_t var = 0;
  bool categorical = false;
  double threshold = 0.0;       // continuous
  std::int32_t label_code = -1; // categorical (one-vs-rest)
  double statistic = 0.0;       // two-sample log-rank chi-squared
};

struct ForestPredictOptions {
  bool route_unseen_to_majority = false; // default: error on unseen labels
};

struct SurvivalForest {
  ForestParams params;
  std::uint32_t mtry_used = 0;
  std::vector<std::string> variable_names;
  std::vector<ColumnKind> variable_kinds;
  std::vector<std::vector<std::string>> variable_labels; // empty for continuous
  std::vector<double> event_time_grid; // distinct training event times
  std::vector<SurvivalTree> trees;

  std::string to_json() const; // debug dump, no stability promised
};

struct VariableRanking {
  struct Entry {
    std::string name;
    double importance = 0.0;
  };
  std::vector<Entry> entries; // sorted by importance descending
};

/// Grows `n_trees` survival trees on independent bootstrap samples with
/// log-rank splitting. Per-tree randomness is derived from (seed, tree
/// index), so results are bit-identical for any worker count.
SurvivalForest grow_forest(const SurvivalDataset& train, const ForestParams& params,
                           int threads = 1);

/// Best admissible split over the candidate variables: all midpoint cuts for
/// continuous variables (quantile-thinned above `max_candidate_cuts`),
/// one-vs-rest for categorical ones; maximizes the two-sample log-rank
/// statistic subject to min_node_events per child. Returns nullopt when no
/// admissible split exists. `rows` may contain duplicates (bootstrap
/// multiplicity).
std::optional<SplitChoice> best_split(const SurvivalDataset& ds,
                                      std::span<const std::uint32_t> rows,
                                      std::span<const std::uint32_t> candidate_vars,
                                      const SplitConstraints& constraints);

/// Pointwise mean of the leaf CHFs reached by row `row` of `ds` (columns
/// matched to the forest schema by name), on the union of their knots.
StepFunction ensemble_chf(const SurvivalForest& forest, const SurvivalDataset& ds,
                          std::size_t row, const ForestPredictOptions& options = {});

/// Scalar risk: sum of the ensemble CHF over the training event-time grid.
double ensemble_mortality(const SurvivalForest& forest, const SurvivalDataset& ds,
                          std::size_t row, const ForestPredictOptions& options = {});

/// Out-of-bag permutation importance: per tree, the increase in
/// (1 - C-index) of the tree's OOB mortality predictions when a variable is
/// permuted within the tree's OOB rows; averaged over trees and sorted
/// descending (ties broken by column order).
VariableRanking permutation_importance(const SurvivalForest& forest,
                                       const SurvivalDataset& train, int threads = 1);

void save_ranking(const VariableRanking& ranking, const std::string& path,
                  const std::string& provenance_comment = "");
VariableRanking load_ranking(const std::string& path);

} // namespace survscore
