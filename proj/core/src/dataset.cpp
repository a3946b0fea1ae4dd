#include "survscore/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"
#include "survscore/rng.hpp"

namespace survscore {

const char* to_string(ColumnKind kind) {
  return kind == ColumnKind::continuous ? "continuous" : "categorical";
}

ColumnKind column_kind_from_string(const std::string& s) {
  if (s == "continuous") return ColumnKind::continuous;
  if (s == "categorical") return ColumnKind::categorical;
  throw ValidationError("unknown column kind '" + s + "' (expected continuous|categorical)");
}

std::size_t SurvivalDataset::n_events() const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), std::uint8_t{1}));
}

std::optional<std::size_t> SurvivalDataset::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  return std::nullopt;
}

const Column& SurvivalDataset::column(const std::string& name) const {
  auto idx = column_index(name);
  if (!idx) throw ValidationError("no such column: " + name);
  return columns[*idx];
}

SurvivalDataset SurvivalDataset::subset(const std::vector<std::size_t>& rows) const {
  SurvivalDataset out;
  out.time_col = time_col;
  out.status_col = status_col;
  out.times.reserve(rows.size());
  out.status.reserve(rows.size());
  for (std::size_t r : rows) {
    out.times.push_back(times[r]);
    out.status.push_back(status[r]);
  }
  out.columns.reserve(columns.size());
  for (const auto& col : columns) {
    Column c;
    c.name = col.name;
    c.kind = col.kind;
    c.labels = col.labels;
    if (col.kind == ColumnKind::continuous) {
      c.numeric.reserve(rows.size());
      for (std::size_t r : rows) c.numeric.push_back(col.numeric[r]);
    } else {
      c.codes.reserve(rows.size());
      for (std::size_t r : rows) c.codes.push_back(col.codes[r]);
    }
    out.columns.push_back(std::move(c));
  }
  return out;
}

void SurvivalDataset::validate() const {
  if (n() == 0) throw ValidationError("dataset is empty");
  if (status.size() != n()) throw ValidationError("times/status length mismatch");
  for (std::size_t i = 0; i < n(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0)
      throw ValidationError("row " + std::to_string(i) + ": time must be a finite nonnegative number");
    if (status[i] > 1)
      throw ValidationError("row " + std::to_string(i) + ": status must be 0 or 1");
  }
  for (const auto& col : columns) {
    if (col.size() != n())
      throw ValidationError("column '" + col.name + "': length mismatch");
    if (col.kind == ColumnKind::continuous) {
      for (std::size_t i = 0; i < n(); ++i)
        if (!std::isfinite(col.numeric[i]))
          throw ValidationError("column '" + col.name + "', row " + std::to_string(i) +
                                ": non-finite value");
    } else {
      for (std::size_t i = 0; i < n(); ++i)
        if (col.codes[i] < 0 || static_cast<std::size_t>(col.codes[i]) >= col.labels.size())
          throw ValidationError("column '" + col.name + "', row " + std::to_string(i) +
                                ": code out of range");
    }
  }
}

std::uint64_t SurvivalDataset::fingerprint() const {
  std::uint64_t h = fnv1a(time_col);
  h = fnv1a(status_col, h);
  h = fnv1a(times.data(), times.size() * sizeof(double), h);
  h = fnv1a(status.data(), status.size(), h);
  for (const auto& col : columns) {
    h = fnv1a(col.name, h);
    if (col.kind == ColumnKind::continuous) {
      h = fnv1a(col.numeric.data(), col.numeric.size() * sizeof(double), h);
    } else {
      h = fnv1a(col.codes.data(), col.codes.size() * sizeof(std::int32_t), h);
      for (const auto& label : col.labels) h = fnv1a(label, h);
    }
  }
  return h;
}

namespace {

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA"; }

double median_of_sorted(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

struct RawColumn {
  std::string name;
  ColumnKind kind;
  std::size_t csv_index;
};

ColumnKind infer_kind(const CsvTable& table, std::size_t col) {
  for (const auto& row : table.rows) {
    const auto& cell = row[col];
    if (is_missing(cell)) continue;
    if (!parse_double(cell)) return ColumnKind::categorical;
  }
  return ColumnKind::continuous;
}

} // namespace

SurvivalDataset load_dataset(const std::string& path, const LoadOptions& options) {
  CsvTable table = read_csv(path);
  if (table.rows.empty()) throw ValidationError(path + ": no data rows");

  auto time_idx = table.column(options.time_col);
  if (!time_idx) throw ValidationError(path + ": missing time column '" + options.time_col + "'");
  auto status_idx = table.column(options.status_col);
  if (!status_idx) throw ValidationError(path + ": missing status column '" + options.status_col + "'");

  std::vector<RawColumn> raw;
  if (options.schema.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == *time_idx || c == *status_idx) continue;
      raw.push_back({table.header[c], infer_kind(table, c), c});
    }
  } else {
    for (const auto& [name, kind] : options.schema) {
      auto idx = table.column(name);
      if (!idx) throw ValidationError(path + ": missing covariate column '" + name + "'");
      if (*idx == *time_idx || *idx == *status_idx)
        throw ValidationError(path + ": column '" + name + "' is the time or status column");
      raw.push_back({name, kind, *idx});
    }
    // Keep file order so inferred and declared schemas agree on layout.
    std::sort(raw.begin(), raw.end(),
              [](const RawColumn& a, const RawColumn& b) { return a.csv_index < b.csv_index; });
  }

  SurvivalDataset ds;
  ds.time_col = options.time_col;
  ds.status_col = options.status_col;
  const std::size_t n = table.rows.size();
  ds.times.resize(n);
  ds.status.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tcell = table.rows[i][*time_idx];
    auto t = parse_double(tcell);
    if (!t || !std::isfinite(*t) || *t < 0)
      throw ValidationError(path + ": row " + std::to_string(i + 1) + ": time '" + tcell +
                            "' is not a finite nonnegative number");
    ds.times[i] = *t;
    const auto& scell = table.rows[i][*status_idx];
    if (scell == "0") ds.status[i] = 0;
    else if (scell == "1") ds.status[i] = 1;
    else
      throw ValidationError(path + ": row " + std::to_string(i + 1) + ": status '" + scell +
                            "' must be 0 or 1");
  }

  for (const auto& rc : raw) {
    Column col;
    col.name = rc.name;
    col.kind = rc.kind;
    std::vector<std::size_t> missing_rows;
    if (rc.kind == ColumnKind::continuous) {
      col.numeric.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = table.rows[i][rc.csv_index];
        if (is_missing(cell)) {
          if (options.missing == MissingPolicy::reject)
            throw ValidationError(path + ": column '" + rc.name + "', row " + std::to_string(i + 1) +
                                  ": missing value (missing_policy=reject)");
          missing_rows.push_back(i);
          continue;
        }
        auto v = parse_double(cell);
        if (!v || !std::isfinite(*v))
          throw ValidationError(path + ": column '" + rc.name + "', row " + std::to_string(i + 1) +
                                ": '" + cell + "' is not a finite number");
        col.numeric[i] = *v;
      }
      if (!missing_rows.empty()) {
        std::vector<double> present;
        present.reserve(n - missing_rows.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (k < missing_rows.size() && missing_rows[k] == i) { ++k; continue; }
          present.push_back(col.numeric[i]);
        }
        if (present.empty())
          throw ValidationError(path + ": column '" + rc.name + "': all values missing");
        double med = median_of_sorted(present);
        for (std::size_t i : missing_rows) col.numeric[i] = med;
      }
    } else {
      col.codes.resize(n, -1);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = table.rows[i][rc.csv_index];
        if (is_missing(cell)) {
          if (options.missing == MissingPolicy::reject)
            throw ValidationError(path + ": column '" + rc.name + "', row " + std::to_string(i + 1) +
                                  ": missing value (missing_policy=reject)");
          missing_rows.push_back(i);
          continue;
        }
        auto it = std::find(col.labels.begin(), col.labels.end(), cell);
        if (it == col.labels.end()) {
          col.labels.push_back(cell);
          col.codes[i] = static_cast<std::int32_t>(col.labels.size() - 1);
        } else {
          col.codes[i] = static_cast<std::int32_t>(it - col.labels.begin());
        }
      }
      if (!missing_rows.empty()) {
        if (col.labels.empty())
          throw ValidationError(path + ": column '" + rc.name + "': all values missing");
        // Mode; ties broken by lexicographically smallest label.
        std::vector<std::size_t> counts(col.labels.size(), 0);
        for (std::size_t i = 0; i < n; ++i)
          if (col.codes[i] >= 0) ++counts[static_cast<std::size_t>(col.codes[i])];
        std::size_t best = 0;
        for (std::size_t c = 1; c < counts.size(); ++c) {
          if (counts[c] > counts[best] ||
              (counts[c] == counts[best] && col.labels[c] < col.labels[best]))
            best = c;
        }
        for (std::size_t i : missing_rows) col.codes[i] = static_cast<std::int32_t>(best);
      }
    }
    ds.columns.push_back(std::move(col));
  }

  ds.validate();
  return ds;
}

void save_dataset(const SurvivalDataset& ds, const std::string& path,
                  const std::string& provenance_comment) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  if (!provenance_comment.empty()) out << "# " << provenance_comment << "\n";
  out << csv_escape(ds.time_col) << "," << csv_escape(ds.status_col);
  for (const auto& col : ds.columns) out << "," << csv_escape(col.name);
  out << "\n";
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out << format_double(ds.times[i]) << "," << int(ds.status[i]);
    for (const auto& col : ds.columns) {
      out << ",";
      if (col.kind == ColumnKind::continuous) out << format_double(col.numeric[i]);
      else out << csv_escape(col.label_of(i));
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

SplitResult split_dataset(const SurvivalDataset& ds, const SplitSpec& spec) {
  double sum = 0;
  for (double r : spec.ratios) {
    if (r < 0 || r > 1) throw ValidationError("split ratios must lie in [0,1]");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");

  const std::size_t n = ds.n();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(order);

  const std::size_t n_val = static_cast<std::size_t>(std::floor(spec.ratios[1] * static_cast<double>(n)));
  const std::size_t n_test = static_cast<std::size_t>(std::floor(spec.ratios[2] * static_cast<double>(n)));
  const std::size_t n_train = n - n_val - n_test; // floor(r0*n) plus remainder rows

  auto take = [&](std::size_t begin, std::size_t count) {
    std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                  order.begin() + static_cast<std::ptrdiff_t>(begin + count));
    return ds.subset(rows);
  };
  SplitResult result{take(0, n_train), take(n_train, n_val), take(n_train + n_val, n_test)};

  const char* names[3] = {"train", "validation", "test"};
  const SurvivalDataset* parts[3] = {&result.train, &result.validation, &result.test};
  for (int i = 0; i < 3; ++i) {
    if (parts[i]->n() == 0)
      throw ValidationError(std::string("split: ") + names[i] + " partition is empty");
    if (parts[i]->n_events() == 0)
      throw ValidationError(std::string("split: ") + names[i] +
                            " partition has zero events; metrics would be undefined");
  }
  return result;
}

CohortSummary summarize(const SurvivalDataset& ds) {
  CohortSummary s;
  s.n = ds.n();
  s.n_events = ds.n_events();
  s.n_censored = s.n - s.n_events;
  s.event_fraction = static_cast<double>(s.n_events) / static_cast<double>(s.n);
  if (s.n_events > 0) {
    std::vector<double> event_times;
    event_times.reserve(s.n_events);
    for (std::size_t i = 0; i < ds.n(); ++i)
      if (ds.status[i]) event_times.push_back(ds.times[i]);
    s.median_survival_among_events = median_of_sorted(event_times);
  }
  return s;
}

const Column& PatientTable::column(const std::string& name) const {
  for (const auto& col : columns)
    if (col.name == name) return col;
  throw ValidationError("patient table: no such column: " + name);
}

PatientTable load_patient_table(const std::string& path,
                                const std::vector<std::pair<std::string, ColumnKind>>& wanted) {
  CsvTable table = read_csv(path);
  if (table.rows.empty()) throw ValidationError(path + ": no data rows");
  PatientTable pt;
  pt.n = table.rows.size();
  for (const auto& [name, kind] : wanted) {
    auto idx = table.column(name);
    if (!idx) throw ValidationError(path + ": missing column '" + name + "'");
    Column col;
    col.name = name;
    col.kind = kind;
    for (std::size_t i = 0; i < pt.n; ++i) {
      const auto& cell = table.rows[i][*idx];
      if (is_missing(cell))
        throw ValidationError(path + ": column '" + name + "', row " + std::to_string(i + 1) +
                              ": missing value");
      if (kind == ColumnKind::continuous) {
        auto v = parse_double(cell);
        if (!v || !std::isfinite(*v))
          throw ValidationError(path + ": column '" + name + "', row " + std::to_string(i + 1) +
                                ": '" + cell + "' is not a finite number");
        col.numeric.push_back(*v);
      } else {
        auto it = std::find(col.labels.begin(), col.labels.end(), cell);
        if (it == col.labels.end()) {
          col.labels.push_back(cell);
          col.codes.push_back(static_cast<std::int32_t>(col.labels.size() - 1));
        } else {
          col.codes.push_back(static_cast<std::int32_t>(it - col.labels.begin()));
        }
      }
    }
    pt.columns.push_back(std::move(col));
  }
  return pt;
}

} // namespace survscore
