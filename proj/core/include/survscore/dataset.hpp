#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace survscore {

enum class ColumnKind { continuous, categorical };

const char* to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

/// One covariate column. Continuous columns hold finite reals in `numeric`;
/// categorical columns hold integer codes into `labels` (first-appearance
/// order).
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<double> numeric;
  std::vector<std::int32_t> codes;
  std::vector<std::string> labels;

  std::size_t size() const {
    return kind == ColumnKind::continuous ? numeric.size() : codes.size();
  }
  const std::string& label_of(std::size_t row) const { return labels[static_cast<std::size_t>(codes[row])]; }
};

/// Right-censored survival data: per-row follow-up time, event indicator
/// (1 = event, 0 = censored) and named covariate columns. Immutable after
/// load; safe to share across threads for reading.
struct SurvivalDataset {
  std::string time_col = "time";
  std::string status_col = "status";
  std::vector<double> times;
  std::vector<std::uint8_t> status;
  std::vector<Column> columns;

  std::size_t n() const { return times.size(); }
  std::size_t n_covariates() const { return columns.size(); }
  std::size_t n_events() const;

  const Column& column(const std::string& name) const;
  std::optional<std::size_t> column_index(const std::string& name) const;

  /// New dataset from the given rows (in the given order). Categorical label
  /// sets are carried over unchanged.
  SurvivalDataset subset(const std::vector<std::size_t>& rows) const;

  /// Checks the type invariants; throws ValidationError on violation.
  void validate() const;

  /// FNV-1a over times, status, and covariate bytes; used for provenance.
  std::uint64_t fingerprint() const;
};

enum class MissingPolicy { reject, impute };

struct LoadOptions {
  std::string time_col = "time";
  std::string status_col = "status";
  /// Declared covariate kinds. Empty map: every non-time/status column is
  /// loaded, continuous if all cells parse as numbers, categorical otherwise.
  std::map<std::string, ColumnKind> schema;
  MissingPolicy missing = MissingPolicy::reject;
};

/// Loads and validates a CSV dataset (UTF-8, header row, ',' separator,
/// '.' decimal point). Empty cells and the literal "NA" are treated as
/// missing. Columns in the file but not in a non-empty schema are ignored.
SurvivalDataset load_dataset(const std::string& path, const LoadOptions& options);

/// Writes a dataset back to CSV; load(save(ds)) round-trips times/status
/// bit-identically and categoricals label-identically.
void save_dataset(const SurvivalDataset& ds, const std::string& path,
                  const std::string& provenance_comment = "");

struct SplitSpec {
  std::array<double, 3> ratios = {0.7, 0.1, 0.2}; // train, validation, test
  std::uint64_t seed = 0;
};

struct SplitResult {
  SurvivalDataset train;
  SurvivalDataset validation;
  SurvivalDataset test;
};

/// Deterministic three-way split: row ids are shuffled with the seeded
/// generator, validation and test take contiguous blocks of floor(ratio*n)
/// rows, train takes the rest (including remainder rows). Every partition
/// must end up with at least one row and one event.
SplitResult split_dataset(const SurvivalDataset& ds, const SplitSpec& spec);

struct CohortSummary {
  std::size_t n = 0;
  std::size_t n_events = 0;
  std::size_t n_censored = 0;
  double event_fraction = 0.0;
  std::optional<double> median_survival_among_events;
};

CohortSummary summarize(const SurvivalDataset& ds);

/// Covariates-only table (for scoring new patients; no time/status columns).
struct PatientTable {
  std::vector<Column> columns;
  std::size_t n = 0;
  const Column& column(const std::string& name) const;
};

/// Loads the named covariate columns from a CSV; other columns are ignored.
PatientTable load_patient_table(const std::string& path,
                                const std::vector<std::pair<std::string, ColumnKind>>& wanted);

} // namespace survscore
