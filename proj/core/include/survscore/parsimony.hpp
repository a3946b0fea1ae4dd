#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survscore/dataset.hpp"
#include "survscore/forest.hpp"

namespace survscore {

struct ParsimonyRow {
  std::uint32_t m = 0;
  std::vector<std::string> variables; // the top-m ranking prefix
  std::optional<double> validation_iauc;
  std::string error; // set when the fit or evaluation failed
};

struct ParsimonyTable {
  std::vector<ParsimonyRow> rows; // m = 1..m_max
  std::optional<std::uint32_t> selected_m;
};

/// For each m in 1..m_max: derive cutoffs and a normalized scorecard for the
/// top-m ranked variables on the training set, score the validation set, and
/// record its iAUC. Failed fits are recorded, not fatal.
ParsimonyTable run_parsimony(const SurvivalDataset& train, const SurvivalDataset& validation,
                             const VariableRanking& ranking, std::uint32_t m_max,
                             std::span<const double> quantile_spec,
                             std::optional<double> horizon, int threads = 1);

enum class SelectionPolicy { manual, elbow };

/// `manual` returns the user-supplied m (its row must have succeeded);
/// `elbow` returns the smallest m whose iAUC is within epsilon of the best.
std::uint32_t select_m(const ParsimonyTable& table, SelectionPolicy policy,
                       std::optional<std::uint32_t> manual_m, double epsilon = 0.005);

void save_parsimony(const ParsimonyTable& table, const std::string& path,
                    const std::string& provenance_comment = "");

} // namespace survscore
