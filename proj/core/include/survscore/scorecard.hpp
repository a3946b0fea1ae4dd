#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survscore/cox.hpp"
#include "survscore/dataset.hpp"

namespace survscore {

/// Per-variable categorization rules: interior cut points for continuous
/// variables (left-closed/right-open intervals with open-ended first and last
/// bins), the observed label set for categorical ones.
struct CutoffSet {
  struct Var {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::vector<double> cuts;        // strictly increasing, continuous only
    std::vector<std::string> labels; // categorical only
    std::size_t n_categories() const {
      return kind == ColumnKind::continuous ? cuts.size() + 1 : labels.size();
    }
  };
  std::vector<Var> vars;

  const Var* find(const std::string& name) const;
};

/// Interior cut points at the given training-set quantiles (linear
/// interpolation between order statistics). Duplicate or out-of-range cuts
/// are dropped; a single-valued variable collapses to one interval with a
/// warning.
CutoffSet derive_cutoffs(const SurvivalDataset& train, const std::vector<std::string>& variables,
                         std::span<const double> quantile_spec,
                         std::vector<std::string>* warnings = nullptr);

/// Category index for a value: the number of cuts <= value, so boundaries
/// belong to the upper interval ([30,48) gets 30, not 29.999).
int apply_cutoffs(double value, std::span<const double> cuts);

/// "<c1", "[c1,c2)", ..., ">=ck"; "any" for a cutless variable.
std::string interval_label(std::span<const double> cuts, std::size_t index);

struct ScoreEntry {
  std::string label;
  int score = 0;
};

struct ScoreVariable {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<double> cuts; // continuous: cuts.size() + 1 == entries.size()
  std::vector<ScoreEntry> entries;
  int max_score() const;
};

struct CardProvenance {
  std::uint64_t seed = 0;
  std::uint32_t m = 0;
  std::uint64_t train_fingerprint = 0;
  std::string config_hash;
};

/// The deliverable: per-variable interval/label tables of integer points.
/// A patient's score is the sum of matched points.
struct ScoreCard {
  std::vector<ScoreVariable> variables;
  int max_total = 0;
  CardProvenance provenance;
};

struct ScoreDerivation {
  ScoreCard card; // raw integer card, before 0-100 normalization
  CoxModel step1;
  CoxModel step2;
  std::vector<std::vector<double>> raw_points; // pre-rounding, per variable/entry
  std::vector<std::string> warnings;
};

/// Two-step weighting: fit a joint Cox model on the categorized design,
/// re-reference each variable to its smallest-coefficient category, refit,
/// then divide every coefficient by the smallest strictly positive one and
/// round half-away-from-zero. Categories with zero events are merged toward
/// the reference before the first fit.
ScoreDerivation derive_scores(const SurvivalDataset& train,
                              const std::vector<std::string>& selected_vars,
                              const CutoffSet& cutoffs);

/// The Module-3 arithmetic on its own: step-2 coefficients (reference 0) to
/// integer points.
std::vector<std::vector<int>> points_from_coefficients(
    const std::vector<std::vector<double>>& coefficients);

/// Rescales partial scores so the per-variable maxima sum to exactly 100,
/// repairing rounding drift on the largest partial score.
ScoreCard normalize_scorecard(const ScoreCard& card);

int score_patient(const ScoreCard& card, const SurvivalDataset& ds, std::size_t row);
int score_patient(const ScoreCard& card, const PatientTable& table, std::size_t row);
std::vector<int> score_all(const ScoreCard& card, const SurvivalDataset& ds);

/// Replaces the cutoffs of the named continuous variables and re-runs
/// derivation + normalization on the training set.
ScoreCard fine_tune(const ScoreCard& card,
                    const std::vector<std::pair<std::string, std::vector<double>>>& overrides,
                    const SurvivalDataset& train);

void save_scorecard_csv(const ScoreCard& card, const std::string& path);
void save_scorecard_json(const ScoreCard& card, const std::string& path);
/// Reads either format (by extension: .json, otherwise CSV).
ScoreCard load_scorecard(const std::string& path);

} // namespace survscore
