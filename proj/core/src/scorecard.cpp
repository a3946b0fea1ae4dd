#include "survscore/scorecard.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"
#include "survscore/stats.hpp"

namespace survscore {

const CutoffSet::Var* CutoffSet::find(const std::string& name) const {
  for (const auto& v : vars)
    if (v.name == name) return &v;
  return nullptr;
}

int apply_cutoffs(double value, std::span<const double> cuts) {
  int idx = 0;
  for (double c : cuts)
    if (value >= c) ++idx;
  return idx;
}

std::string interval_label(std::span<const double> cuts, std::size_t index) {
  if (cuts.empty()) return "any";
  if (index == 0) return "<" + format_double(cuts[0]);
  if (index == cuts.size()) return ">=" + format_double(cuts[cuts.size() - 1]);
  return "[" + format_double(cuts[index - 1]) + "," + format_double(cuts[index]) + ")";
}

CutoffSet derive_cutoffs(const SurvivalDataset& train, const std::vector<std::string>& variables,
                         std::span<const double> quantile_spec,
                         std::vector<std::string>* warnings) {
  CutoffSet set;
  for (const auto& name : variables) {
    const Column& col = train.column(name);
    CutoffSet::Var var;
    var.name = name;
    var.kind = col.kind;
    if (col.kind == ColumnKind::categorical) {
      var.labels = col.labels;
    } else {
      std::vector<double> sorted = col.numeric;
      std::sort(sorted.begin(), sorted.end());
      const double lo = sorted.front();
      const double hi = sorted.back();
      for (double q : quantile_spec) {
        if (!(q > 0.0 && q < 1.0))
          throw ValidationError("derive_cutoffs: quantiles must lie in (0,1)");
        double c = quantile_type7(sorted, q);
        // A cut at or below the minimum (or above the maximum) would create
        // an empty bin; drop it as degenerate.
        if (c > lo && c <= hi) var.cuts.push_back(c);
      }
      std::sort(var.cuts.begin(), var.cuts.end());
      var.cuts.erase(std::unique(var.cuts.begin(), var.cuts.end()), var.cuts.end());
      if (var.cuts.empty() && warnings)
        warnings->push_back("variable '" + name + "' collapsed to a single interval");
    }
    set.vars.push_back(std::move(var));
  }
  return set;
}

int ScoreVariable::max_score() const {
  int m = 0;
  for (const auto& e : entries) m = std::max(m, e.score);
  return m;
}

namespace {

double round_half_away(double x) { return std::round(x); }

// Categorized view of one variable after zero-event merging. For continuous
// variables merging removes cut points; for categorical ones it pools labels
// into groups that share a coefficient.
struct CategorizedVar {
  std::string name;
  ColumnKind kind;
  std::vector<double> cuts;                  // continuous, post-merge
  std::vector<std::string> labels;           // categorical, original labels
  std::vector<std::size_t> label_group;      // categorical: label -> fit category
  std::vector<std::string> fit_categories;   // names used in the Cox encoding
  std::vector<std::int32_t> assignment;      // per row fit category
  bool in_design = false;                    // false when collapsed to one category
};

CategorizedVar categorize(const SurvivalDataset& train, const CutoffSet::Var& spec,
                          std::vector<std::string>* warnings) {
  const Column& col = train.column(spec.name);
  if (col.kind != spec.kind)
    throw ValidationError("cutoffs for '" + spec.name + "' do not match the column kind");
  CategorizedVar out;
  out.name = spec.name;
  out.kind = spec.kind;
  const std::size_t n = train.n();

  if (spec.kind == ColumnKind::continuous) {
    out.cuts = spec.cuts;
    for (std::size_t i = 1; i < out.cuts.size(); ++i)
      if (!(out.cuts[i - 1] < out.cuts[i]))
        throw ValidationError("cutoffs for '" + spec.name + "' are not strictly increasing");
    // Merge zero-event bins toward the reference (bin 0) until none remain.
    for (;;) {
      const std::size_t bins = out.cuts.size() + 1;
      if (bins == 1) break;
      std::vector<std::size_t> events(bins, 0);
      for (std::size_t i = 0; i < n; ++i)
        if (train.status[i])
          ++events[static_cast<std::size_t>(apply_cutoffs(col.numeric[i], out.cuts))];
      std::size_t bad = bins;
      for (std::size_t b = 0; b < bins; ++b)
        if (events[b] == 0) { bad = b; break; }
      if (bad == bins) break;
      const std::size_t drop = bad == 0 ? 0 : bad - 1;
      if (warnings)
        warnings->push_back("variable '" + spec.name + "': interval " +
                            interval_label(out.cuts, bad) +
                            " has no events; merged toward the reference");
      out.cuts.erase(out.cuts.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    out.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out.assignment[i] = apply_cutoffs(col.numeric[i], out.cuts);
    for (std::size_t b = 0; b < out.cuts.size() + 1; ++b)
      out.fit_categories.push_back(interval_label(out.cuts, b));
    out.in_design = out.cuts.size() >= 1;
  } else {
    out.labels = spec.labels;
    if (out.labels.empty())
      throw ValidationError("variable '" + spec.name + "' has no categories");
    const std::size_t L = out.labels.size();
    out.label_group.resize(L);
    std::iota(out.label_group.begin(), out.label_group.end(), std::size_t{0});
    // Rows must carry labels known to the cutoff set.
    std::vector<std::size_t> code_of_row(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& lab = col.label_of(i);
      auto it = std::find(out.labels.begin(), out.labels.end(), lab);
      if (it == out.labels.end())
        throw ValidationError("variable '" + spec.name + "': label '" + lab +
                              "' not present in the cutoff set");
      code_of_row[i] = static_cast<std::size_t>(it - out.labels.begin());
    }
    for (;;) {
      std::vector<std::size_t> groups; // distinct group ids, ordered
      for (std::size_t l = 0; l < L; ++l)
        if (std::find(groups.begin(), groups.end(), out.label_group[l]) == groups.end())
          groups.push_back(out.label_group[l]);
      if (groups.size() == 1) break;
      std::vector<std::size_t> events(L, 0);
      for (std::size_t i = 0; i < n; ++i)
        if (train.status[i]) ++events[out.label_group[code_of_row[i]]];
      std::size_t bad = L;
      for (std::size_t g : groups)
        if (events[g] == 0) { bad = g; break; }
      if (bad == L) break;
      // Merge the empty group into the reference group (the first label's).
      const std::size_t ref_group = out.label_group[0];
      const std::size_t target = bad == ref_group ? groups[bad == groups[0] ? 1 : 0] : ref_group;
      if (warnings)
        warnings->push_back("variable '" + spec.name +
                            "': a category has no events; merged with the reference");
      for (std::size_t l = 0; l < L; ++l)
        if (out.label_group[l] == bad) out.label_group[l] = target;
    }
    // Compact group ids to 0..G-1 in first-appearance order.
    std::vector<std::size_t> remap(L, SIZE_MAX);
    std::size_t next_id = 0;
    for (std::size_t l = 0; l < L; ++l) {
      if (remap[out.label_group[l]] == SIZE_MAX) {
        remap[out.label_group[l]] = next_id++;
        std::string name;
        for (std::size_t k = l; k < L; ++k) {
          if (out.label_group[k] != out.label_group[l]) continue;
          if (!name.empty()) name += "|";
          name += out.labels[k];
        }
        out.fit_categories.push_back(name);
      }
    }
    for (auto& g : out.label_group) g = remap[g];
    out.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out.assignment[i] = static_cast<std::int32_t>(out.label_group[code_of_row[i]]);
    out.in_design = next_id >= 2;
  }
  return out;
}

CoxDesign build_design(const SurvivalDataset& train, const std::vector<CategorizedVar>& vars,
                       const std::vector<std::size_t>& references) {
  CoxDesign design;
  design.times = train.times;
  design.status = train.status;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (!vars[v].in_design) continue;
    CoxEncoding::Var ev;
    ev.name = vars[v].name;
    ev.categories = vars[v].fit_categories;
    ev.reference = references[v];
    design.encoding.vars.push_back(std::move(ev));
    design.categories.push_back(std::vector<std::int32_t>(vars[v].assignment));
  }
  return design;
}

} // namespace

std::vector<std::vector<int>> points_from_coefficients(
    const std::vector<std::vector<double>>& coefficients) {
  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto& var : coefficients)
    for (double c : var)
      if (c > 0.0 && c < min_positive) min_positive = c;
  if (!std::isfinite(min_positive))
    throw NumericError("score derivation: no positive coefficient to scale by "
                       "(degenerate model, all coefficients zero)");
  std::vector<std::vector<int>> points;
  points.reserve(coefficients.size());
  for (const auto& var : coefficients) {
    std::vector<int> p;
    p.reserve(var.size());
    for (double c : var) p.push_back(static_cast<int>(round_half_away(c / min_positive)));
    points.push_back(std::move(p));
  }
  return points;
}

ScoreDerivation derive_scores(const SurvivalDataset& train,
                              const std::vector<std::string>& selected_vars,
                              const CutoffSet& cutoffs) {
  if (selected_vars.empty()) throw ValidationError("derive_scores: no variables selected");
  ScoreDerivation result;

  std::vector<CategorizedVar> cat;
  cat.reserve(selected_vars.size());
  for (const auto& name : selected_vars) {
    const CutoffSet::Var* spec = cutoffs.find(name);
    if (!spec) throw ValidationError("derive_scores: no cutoffs for variable '" + name + "'");
    cat.push_back(categorize(train, *spec, &result.warnings));
  }

  // Step 1: joint fit with the first category of each variable as reference.
  std::vector<std::size_t> references(cat.size(), 0);
  CoxDesign design1 = build_design(train, cat, references);
  if (design1.encoding.vars.empty())
    throw NumericError("score derivation: every selected variable collapsed to one category");
  result.step1 = fit_cox(design1);

  // Re-reference each variable to its smallest coefficient (reference = 0).
  {
    std::size_t d = 0;
    for (std::size_t v = 0; v < cat.size(); ++v) {
      if (!cat[v].in_design) continue;
      const auto& coefs = result.step1.coef_by_var[d];
      std::size_t best = 0;
      for (std::size_t c = 1; c < coefs.size(); ++c)
        if (coefs[c] < coefs[best]) best = c;
      references[v] = best;
      ++d;
    }
  }

  // Step 2: refit under the new references, warm-started at the shifted
  // step-1 solution (the partial likelihood is reparameterization-invariant).
  CoxDesign design2 = build_design(train, cat, references);
  CoxFitOptions opt2;
  {
    std::vector<double> init(design2.encoding.n_dummies(), 0.0);
    std::size_t d = 0;
    for (std::size_t v = 0; v < cat.size(); ++v) {
      if (!cat[v].in_design) continue;
      const auto& coefs = result.step1.coef_by_var[d];
      for (std::size_t c = 0; c < coefs.size(); ++c) {
        std::ptrdiff_t j = design2.encoding.dummy_index(d, c);
        if (j >= 0) init[static_cast<std::size_t>(j)] = coefs[c] - coefs[references[v]];
      }
      ++d;
    }
    opt2.initial_beta = std::move(init);
  }
  result.step2 = fit_cox(design2, opt2);

  // Collect step-2 coefficients per selected variable (collapsed ones get a
  // single zero) and clamp numerical noise below zero.
  std::vector<std::vector<double>> coefficients;
  {
    std::size_t d = 0;
    for (auto& cv : cat) {
      if (!cv.in_design) {
        coefficients.push_back({0.0});
        continue;
      }
      std::vector<double> coefs = result.step2.coef_by_var[d];
      for (double& c : coefs) {
        if (c < 0.0) {
          if (c < -1e-6)
            result.warnings.push_back("variable '" + cv.name +
                                      "': step-2 coefficient " + format_double(c) +
                                      " below zero; clamped");
          c = 0.0;
        }
      }
      coefficients.push_back(std::move(coefs));
      ++d;
    }
  }

  std::vector<std::vector<int>> points = points_from_coefficients(coefficients);

  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto& var : coefficients)
    for (double c : var)
      if (c > 0.0 && c < min_positive) min_positive = c;

  ScoreCard card;
  for (std::size_t v = 0; v < cat.size(); ++v) {
    const CategorizedVar& cv = cat[v];
    ScoreVariable sv;
    sv.name = cv.name;
    sv.kind = cv.kind;
    std::vector<double> raw;
    if (cv.kind == ColumnKind::continuous) {
      sv.cuts = cv.cuts;
      const std::size_t bins = cv.cuts.size() + 1;
      for (std::size_t b = 0; b < bins; ++b) {
        const int score = cv.in_design ? points[v][b] : 0;
        sv.entries.push_back({interval_label(cv.cuts, b), score});
        raw.push_back(cv.in_design ? coefficients[v][b] / min_positive : 0.0);
      }
    } else {
      for (std::size_t l = 0; l < cv.labels.size(); ++l) {
        const std::size_t g = cv.in_design ? cv.label_group[l] : 0;
        const int score = cv.in_design ? points[v][g] : 0;
        sv.entries.push_back({cv.labels[l], score});
        raw.push_back(cv.in_design ? coefficients[v][g] / min_positive : 0.0);
      }
    }
    card.max_total += sv.max_score();
    card.variables.push_back(std::move(sv));
    result.raw_points.push_back(std::move(raw));
  }
  card.provenance.m = static_cast<std::uint32_t>(selected_vars.size());
  card.provenance.train_fingerprint = train.fingerprint();
  result.card = std::move(card);
  return result;
}

ScoreCard normalize_scorecard(const ScoreCard& card) {
  int total = 0;
  for (const auto& v : card.variables) total += v.max_score();
  if (total <= 0) throw NumericError("normalize_scorecard: zero maximum total score");

  ScoreCard out = card;
  const double scale = 100.0 / static_cast<double>(total);
  for (auto& v : out.variables)
    for (auto& e : v.entries)
      e.score = static_cast<int>(round_half_away(e.score * scale));

  // Repair rounding drift on the largest partial score until the maxima sum
  // to exactly 100.
  for (int rounds = 0; rounds < 64; ++rounds) {
    int sum = 0;
    for (const auto& v : out.variables) sum += v.max_score();
    const int drift = 100 - sum;
    if (drift == 0) break;
    ScoreEntry* largest = nullptr;
    for (auto& v : out.variables)
      for (auto& e : v.entries)
        if (!largest || e.score > largest->score) largest = &e;
    if (!largest || largest->score + drift < 0)
      throw NumericError("normalize_scorecard: cannot repair rounding drift");
    largest->score += drift;
  }
  out.max_total = 0;
  for (const auto& v : out.variables) out.max_total += v.max_score();
  if (out.max_total != 100)
    throw NumericError("normalize_scorecard: rounding drift repair failed");
  return out;
}

namespace {

int score_one(const ScoreVariable& var, double numeric, const std::string* label) {
  if (var.kind == ColumnKind::continuous) {
    return var.entries[static_cast<std::size_t>(apply_cutoffs(numeric, var.cuts))].score;
  }
  for (const auto& e : var.entries)
    if (e.label == *label) return e.score;
  throw ValidationError("score: unseen label '" + *label + "' for variable '" + var.name + "'");
}

} // namespace

int score_patient(const ScoreCard& card, const SurvivalDataset& ds, std::size_t row) {
  int total = 0;
  for (const auto& var : card.variables) {
    auto idx = ds.column_index(var.name);
    if (!idx) throw ValidationError("score: dataset lacks variable '" + var.name + "'");
    const Column& col = ds.columns[*idx];
    if (col.kind != var.kind)
      throw ValidationError("score: variable '" + var.name + "' kind mismatch");
    if (col.kind == ColumnKind::continuous) {
      total += score_one(var, col.numeric[row], nullptr);
    } else {
      const std::string& lab = col.label_of(row);
      total += score_one(var, 0.0, &lab);
    }
  }
  return total;
}

int score_patient(const ScoreCard& card, const PatientTable& table, std::size_t row) {
  int total = 0;
  for (const auto& var : card.variables) {
    const Column& col = table.column(var.name);
    if (col.kind != var.kind)
      throw ValidationError("score: variable '" + var.name + "' kind mismatch");
    if (col.kind == ColumnKind::continuous) {
      total += score_one(var, col.numeric[row], nullptr);
    } else {
      const std::string& lab = col.label_of(row);
      total += score_one(var, 0.0, &lab);
    }
  }
  return total;
}

std::vector<int> score_all(const ScoreCard& card, const SurvivalDataset& ds) {
  std::vector<int> scores(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) scores[i] = score_patient(card, ds, i);
  return scores;
}

ScoreCard fine_tune(const ScoreCard& card,
                    const std::vector<std::pair<std::string, std::vector<double>>>& overrides,
                    const SurvivalDataset& train) {
  CutoffSet cutoffs;
  std::vector<std::string> names;
  for (const auto& var : card.variables) {
    CutoffSet::Var v;
    v.name = var.name;
    v.kind = var.kind;
    if (var.kind == ColumnKind::continuous) {
      v.cuts = var.cuts;
    } else {
      for (const auto& e : var.entries) v.labels.push_back(e.label);
    }
    cutoffs.vars.push_back(std::move(v));
    names.push_back(var.name);
  }
  for (const auto& [name, cuts] : overrides) {
    bool found = false;
    for (auto& v : cutoffs.vars) {
      if (v.name != name) continue;
      if (v.kind != ColumnKind::continuous)
        throw ValidationError("fine_tune: variable '" + name + "' is categorical");
      for (std::size_t i = 1; i < cuts.size(); ++i)
        if (!(cuts[i - 1] < cuts[i]))
          throw ValidationError("fine_tune: cutoffs for '" + name +
                                "' are not strictly increasing");
      v.cuts = cuts;
      found = true;
      break;
    }
    if (!found) throw ValidationError("fine_tune: card has no variable '" + name + "'");
  }
  ScoreDerivation derivation = derive_scores(train, names, cutoffs);
  ScoreCard out = normalize_scorecard(derivation.card);
  out.provenance.seed = card.provenance.seed;
  out.provenance.config_hash = card.provenance.config_hash;
  return out;
}

void save_scorecard_csv(const ScoreCard& card, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << "# scorecard seed=" << card.provenance.seed << " m=" << card.provenance.m
      << " train=" << hex64(card.provenance.train_fingerprint)
      << " config=" << (card.provenance.config_hash.empty() ? "-" : card.provenance.config_hash)
      << "\n";
  out << "variable,interval,score\n";
  for (const auto& var : card.variables)
    for (const auto& e : var.entries)
      out << csv_escape(var.name) << "," << csv_escape(e.label) << "," << e.score << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void save_scorecard_json(const ScoreCard& card, const std::string& path) {
  nlohmann::json j;
  j["max_total"] = card.max_total;
  j["provenance"] = {{"seed", card.provenance.seed},
                     {"m", card.provenance.m},
                     {"train_fingerprint", hex64(card.provenance.train_fingerprint)},
                     {"config_hash", card.provenance.config_hash}};
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& var : card.variables) {
    nlohmann::json v;
    v["name"] = var.name;
    v["kind"] = to_string(var.kind);
    if (var.kind == ColumnKind::continuous) v["cuts"] = var.cuts;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : var.entries) entries.push_back({{"label", e.label}, {"score", e.score}});
    v["entries"] = entries;
    vars.push_back(v);
  }
  j["variables"] = vars;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

namespace {

// Reconstructs cut points from "<a", "[a,b)", ">=b" labels; returns nullopt
// if the labels do not form a consistent interval chain.
std::optional<std::vector<double>> cuts_from_labels(const std::vector<std::string>& labels) {
  if (labels.size() == 1 && labels[0] == "any") return std::vector<double>{};
  if (labels.size() < 2) return std::nullopt;
  std::vector<double> cuts;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& lab = labels[i];
    if (i == 0) {
      if (lab.size() < 2 || lab[0] != '<') return std::nullopt;
      auto v = parse_double(lab.substr(1));
      if (!v) return std::nullopt;
      cuts.push_back(*v);
    } else if (i + 1 == labels.size()) {
      if (lab.size() < 3 || lab.substr(0, 2) != ">=") return std::nullopt;
      auto v = parse_double(lab.substr(2));
      if (!v || *v != cuts.back()) return std::nullopt;
    } else {
      if (lab.size() < 5 || lab.front() != '[' || lab.back() != ')') return std::nullopt;
      auto comma = lab.find(',');
      if (comma == std::string::npos) return std::nullopt;
      auto a = parse_double(lab.substr(1, comma - 1));
      auto b = parse_double(lab.substr(comma + 1, lab.size() - comma - 2));
      if (!a || !b || *a != cuts.back() || !(*b > *a)) return std::nullopt;
      cuts.push_back(*b);
    }
  }
  return cuts;
}

ScoreCard load_scorecard_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  auto var_col = table.column("variable");
  auto int_col = table.column("interval");
  auto score_col = table.column("score");
  if (!var_col || !int_col || !score_col)
    throw ValidationError(path + ": expected columns variable,interval,score");
  ScoreCard card;
  for (const auto& row : table.rows) {
    const std::string& name = row[*var_col];
    if (card.variables.empty() || card.variables.back().name != name) {
      if (std::any_of(card.variables.begin(), card.variables.end(),
                      [&](const ScoreVariable& v) { return v.name == name; }))
        throw ValidationError(path + ": rows of variable '" + name + "' are not contiguous");
      card.variables.push_back({name, ColumnKind::categorical, {}, {}});
    }
    auto score = parse_double(row[*score_col]);
    if (!score || *score != std::floor(*score))
      throw ValidationError(path + ": score '" + row[*score_col] + "' is not an integer");
    card.variables.back().entries.push_back({row[*int_col], static_cast<int>(*score)});
  }
  if (card.variables.empty()) throw ValidationError(path + ": empty scorecard");
  for (auto& var : card.variables) {
    std::vector<std::string> labels;
    for (const auto& e : var.entries) labels.push_back(e.label);
    if (auto cuts = cuts_from_labels(labels)) {
      var.kind = ColumnKind::continuous;
      var.cuts = *cuts;
    }
    card.max_total += var.max_score();
  }
  return card;
}

ScoreCard load_scorecard_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
  ScoreCard card;
  try {
    card.max_total = j.at("max_total").get<int>();
    if (j.contains("provenance")) {
      const auto& p = j["provenance"];
      card.provenance.seed = p.value("seed", std::uint64_t{0});
      card.provenance.m = p.value("m", std::uint32_t{0});
      card.provenance.config_hash = p.value("config_hash", std::string{});
      card.provenance.train_fingerprint =
          std::stoull(p.value("train_fingerprint", std::string{"0"}), nullptr, 16);
    }
    for (const auto& v : j.at("variables")) {
      ScoreVariable var;
      var.name = v.at("name").get<std::string>();
      var.kind = column_kind_from_string(v.at("kind").get<std::string>());
      if (var.kind == ColumnKind::continuous && v.contains("cuts"))
        var.cuts = v["cuts"].get<std::vector<double>>();
      for (const auto& e : v.at("entries"))
        var.entries.push_back({e.at("label").get<std::string>(), e.at("score").get<int>()});
      if (var.kind == ColumnKind::continuous && var.cuts.size() + 1 != var.entries.size())
        throw ValidationError(path + ": variable '" + var.name +
                              "': cuts/entries size mismatch");
      card.variables.push_back(std::move(var));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": malformed scorecard: " + e.what());
  }
  return card;
}

} // namespace

ScoreCard load_scorecard(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return load_scorecard_json(path);
  return load_scorecard_csv(path);
}

} // namespace survscore
