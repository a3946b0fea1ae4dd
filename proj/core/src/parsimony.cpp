#include "survscore/parsimony.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"
#include "survscore/metrics.hpp"
#include "survscore/parallel.hpp"
#include "survscore/scorecard.hpp"

namespace survscore {

ParsimonyTable run_parsimony(const SurvivalDataset& train, const SurvivalDataset& validation,
                             const VariableRanking& ranking, std::uint32_t m_max,
                             std::span<const double> quantile_spec,
                             std::optional<double> horizon, int threads) {
  if (ranking.entries.empty()) throw ValidationError("run_parsimony: empty ranking");
  if (m_max == 0 || m_max > ranking.entries.size())
    m_max = static_cast<std::uint32_t>(ranking.entries.size());

  double h = horizon.value_or(0.0);
  if (!horizon) {
    for (std::size_t i = 0; i < validation.n(); ++i)
      if (validation.status[i]) h = std::max(h, validation.times[i]);
  }

  ParsimonyTable table;
  table.rows.resize(m_max);
  parallel_for(m_max, threads, [&](std::size_t idx) {
    const auto m = static_cast<std::uint32_t>(idx + 1);
    ParsimonyRow& row = table.rows[idx];
    row.m = m;
    for (std::uint32_t v = 0; v < m; ++v) row.variables.push_back(ranking.entries[v].name);
    try {
      CutoffSet cutoffs = derive_cutoffs(train, row.variables, quantile_spec);
      ScoreDerivation derivation = derive_scores(train, row.variables, cutoffs);
      ScoreCard card = normalize_scorecard(derivation.card);
      std::vector<int> int_scores = score_all(card, validation);
      std::vector<double> scores(int_scores.begin(), int_scores.end());
      row.validation_iauc = iauc(scores, validation.times, validation.status, h,
                                 RiskOrientation::higher_is_riskier);
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return table;
}

std::uint32_t select_m(const ParsimonyTable& table, SelectionPolicy policy,
                       std::optional<std::uint32_t> manual_m, double epsilon) {
  bool any_success = std::any_of(table.rows.begin(), table.rows.end(),
                                 [](const ParsimonyRow& r) { return r.validation_iauc.has_value(); });
  if (!any_success) throw NumericError("select_m: every parsimony row failed");

  if (policy == SelectionPolicy::manual) {
    if (!manual_m) throw ValidationError("select_m: manual policy requires m");
    for (const auto& row : table.rows) {
      if (row.m != *manual_m) continue;
      if (!row.validation_iauc)
        throw NumericError("select_m: requested m=" + std::to_string(*manual_m) +
                           " failed: " + row.error);
      return row.m;
    }
    throw ValidationError("select_m: m=" + std::to_string(*manual_m) + " is not in the table");
  }

  double best = -1.0;
  for (const auto& row : table.rows)
    if (row.validation_iauc) best = std::max(best, *row.validation_iauc);
  for (const auto& row : table.rows)
    if (row.validation_iauc && *row.validation_iauc >= best - epsilon) return row.m;
  throw NumericError("select_m: no row within epsilon of the maximum"); // unreachable
}

void save_parsimony(const ParsimonyTable& table, const std::string& path,
                    const std::string& provenance_comment) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  if (!provenance_comment.empty()) out << "# " << provenance_comment << "\n";
  out << "m,iauc,variables,error\n";
  for (const auto& row : table.rows) {
    std::string joined;
    for (std::size_t i = 0; i < row.variables.size(); ++i) {
      if (i) joined += ";";
      joined += row.variables[i];
    }
    out << row.m << "," << (row.validation_iauc ? format_double(*row.validation_iauc) : "")
        << "," << csv_escape(joined) << "," << csv_escape(row.error) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

} // namespace survscore
