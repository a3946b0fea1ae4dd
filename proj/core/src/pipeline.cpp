#include "survscore/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"
#include "survscore/metrics.hpp"
#include "survscore/rng.hpp"
#include "survscore/scorecard.hpp"

namespace survscore {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
  }
}

} // namespace

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }

  PipelineConfig cfg;
  try {
    reject_unknown_keys(j, {"data", "split", "forest", "quantiles", "selection",
                            "cutoff_overrides", "evaluation", "seed", "card", "ranking"},
                        "top level");
    if (j.contains("data")) {
      const auto& d = j["data"];
      reject_unknown_keys(d, {"path", "time_col", "status_col", "columns", "missing_policy"},
                          "data");
      cfg.data_path = d.value("path", std::string{});
      cfg.time_col = d.value("time_col", cfg.time_col);
      cfg.status_col = d.value("status_col", cfg.status_col);
      if (d.contains("columns"))
        for (auto it = d["columns"].begin(); it != d["columns"].end(); ++it)
          cfg.schema[it.key()] = column_kind_from_string(it.value().get<std::string>());
      const std::string mp = d.value("missing_policy", std::string{"reject"});
      if (mp == "reject") cfg.missing = MissingPolicy::reject;
      else if (mp == "impute") cfg.missing = MissingPolicy::impute;
      else throw ValidationError("config: missing_policy must be reject|impute");
    }
    if (j.contains("split")) {
      reject_unknown_keys(j["split"], {"ratios"}, "split");
      if (j["split"].contains("ratios")) {
        auto r = j["split"]["ratios"].get<std::vector<double>>();
        if (r.size() != 3) throw ValidationError("config: split.ratios needs 3 entries");
        cfg.ratios = {r[0], r[1], r[2]};
      }
    }
    if (j.contains("forest")) {
      const auto& f = j["forest"];
      reject_unknown_keys(f, {"n_trees", "mtry", "min_node_size", "min_node_events",
                              "max_depth", "max_candidate_cuts"},
                          "forest");
      cfg.forest.n_trees = f.value("n_trees", cfg.forest.n_trees);
      cfg.forest.mtry = f.value("mtry", cfg.forest.mtry);
      cfg.forest.min_node_size = f.value("min_node_size", cfg.forest.min_node_size);
      cfg.forest.min_node_events = f.value("min_node_events", cfg.forest.min_node_events);
      cfg.forest.max_depth = f.value("max_depth", cfg.forest.max_depth);
      cfg.forest.max_candidate_cuts = f.value("max_candidate_cuts", cfg.forest.max_candidate_cuts);
    }
    if (j.contains("quantiles")) cfg.quantiles = j["quantiles"].get<std::vector<double>>();
    if (j.contains("selection")) {
      const auto& s = j["selection"];
      reject_unknown_keys(s, {"m", "policy", "epsilon", "m_max"}, "selection");
      if (s.contains("m")) cfg.m = s["m"].get<std::uint32_t>();
      if (s.contains("m_max")) cfg.m_max = s["m_max"].get<std::uint32_t>();
      cfg.epsilon = s.value("epsilon", cfg.epsilon);
      const std::string policy = s.value("policy", std::string{"manual"});
      if (policy == "manual") cfg.selection = SelectionPolicy::manual;
      else if (policy == "elbow") cfg.selection = SelectionPolicy::elbow;
      else throw ValidationError("config: selection.policy must be manual|elbow");
    }
    if (j.contains("cutoff_overrides"))
      for (auto it = j["cutoff_overrides"].begin(); it != j["cutoff_overrides"].end(); ++it)
        cfg.cutoff_overrides.emplace_back(it.key(), it.value().get<std::vector<double>>());
    if (j.contains("evaluation")) {
      const auto& e = j["evaluation"];
      reject_unknown_keys(e, {"times", "horizon", "strata", "bootstrap"}, "evaluation");
      if (e.contains("times")) cfg.evaluation_times = e["times"].get<std::vector<double>>();
      if (e.contains("horizon")) cfg.horizon = e["horizon"].get<double>();
      if (e.contains("strata")) cfg.strata_edges = e["strata"].get<std::vector<double>>();
      if (e.contains("bootstrap")) {
        const auto& b = e["bootstrap"];
        reject_unknown_keys(b, {"resamples", "level"}, "evaluation.bootstrap");
        cfg.bootstrap_resamples = b.value("resamples", cfg.bootstrap_resamples);
        cfg.bootstrap_level = b.value("level", cfg.bootstrap_level);
      }
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.card_path = j.value("card", cfg.card_path);
    cfg.ranking_path = j.value("ranking", cfg.ranking_path);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed config: " + e.what());
  }

  if (cfg.horizon)
    for (double t : cfg.evaluation_times)
      if (t > *cfg.horizon)
        throw ValidationError("config: evaluation time " + format_double(t) +
                              " exceeds the horizon");
  if (!std::is_sorted(cfg.strata_edges.begin(), cfg.strata_edges.end()) ||
      std::adjacent_find(cfg.strata_edges.begin(), cfg.strata_edges.end()) !=
          cfg.strata_edges.end())
    throw ValidationError("config: strata edges must be strictly increasing");
  return cfg;
}

std::string config_hash(const PipelineConfig& cfg) {
  json j;
  j["data"] = {{"path", cfg.data_path}, {"time_col", cfg.time_col},
               {"status_col", cfg.status_col},
               {"missing", cfg.missing == MissingPolicy::reject ? "reject" : "impute"}};
  json cols;
  for (const auto& [name, kind] : cfg.schema) cols[name] = to_string(kind);
  j["columns"] = cols;
  j["ratios"] = cfg.ratios;
  j["forest"] = {{"n_trees", cfg.forest.n_trees}, {"mtry", cfg.forest.mtry},
                 {"min_node_size", cfg.forest.min_node_size},
                 {"min_node_events", cfg.forest.min_node_events},
                 {"max_depth", cfg.forest.max_depth},
                 {"max_candidate_cuts", cfg.forest.max_candidate_cuts}};
  j["quantiles"] = cfg.quantiles;
  j["m"] = cfg.m ? json(*cfg.m) : json();
  j["m_max"] = cfg.m_max ? json(*cfg.m_max) : json();
  j["selection"] = cfg.selection == SelectionPolicy::manual ? "manual" : "elbow";
  j["epsilon"] = cfg.epsilon;
  json ov;
  for (const auto& [name, cuts] : cfg.cutoff_overrides) ov[name] = cuts;
  j["cutoff_overrides"] = ov;
  j["evaluation_times"] = cfg.evaluation_times;
  j["horizon"] = cfg.horizon ? json(*cfg.horizon) : json();
  j["strata"] = cfg.strata_edges;
  j["bootstrap"] = {{"resamples", cfg.bootstrap_resamples}, {"level", cfg.bootstrap_level}};
  j["seed"] = cfg.seed;
  j["card"] = cfg.card_path;
  j["ranking"] = cfg.ranking_path;
  return hex64(fnv1a(j.dump()));
}

namespace {

std::string provenance_comment(const PipelineConfig& cfg) {
  return "config=" + config_hash(cfg) + " seed=" + std::to_string(cfg.seed);
}

std::filesystem::path out_path(const RunContext& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  return std::filesystem::path(ctx.out_dir) / name;
}

void write_provenance(const PipelineConfig& cfg, const RunContext& ctx,
                      const std::string& command, const std::vector<std::string>& outputs) {
  json j;
  j["command"] = command;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  j["outputs"] = outputs;
  std::ofstream out(out_path(ctx, "provenance.json"));
  if (!out) throw IoError("cannot write provenance.json");
  out << j.dump(2) << "\n";
}

SurvivalDataset load_from_config(const PipelineConfig& cfg) {
  if (cfg.data_path.empty()) throw ValidationError("config: data.path is required");
  LoadOptions opt;
  opt.time_col = cfg.time_col;
  opt.status_col = cfg.status_col;
  opt.schema = cfg.schema;
  opt.missing = cfg.missing;
  return load_dataset(cfg.data_path, opt);
}

SplitResult split_from_config(const PipelineConfig& cfg, const SurvivalDataset& ds) {
  SplitSpec spec;
  spec.ratios = cfg.ratios;
  spec.seed = derive_seed(cfg.seed, {rng_stream::split});
  return split_dataset(ds, spec);
}

VariableRanking compute_ranking(const PipelineConfig& cfg, const RunContext& ctx,
                                const SurvivalDataset& train) {
  ForestParams params = cfg.forest;
  params.seed = cfg.seed;
  SurvivalForest forest = grow_forest(train, params, ctx.threads);
  return permutation_importance(forest, train, ctx.threads);
}

std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(c);
    else if (c == '<') out += "le";
    else if (c == '>') out += "gt";
    else if (c == '.') out.push_back('p');
    else if (c == '-') out.push_back('m');
    else if (!out.empty() && out.back() != '_') out.push_back('_');
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::vector<std::string> strata_labels(const std::vector<double>& edges) {
  std::vector<std::string> labels;
  if (edges.empty()) return {"all"};
  labels.push_back("<=" + format_double(edges.front()));
  for (std::size_t i = 1; i < edges.size(); ++i)
    labels.push_back("(" + format_double(edges[i - 1]) + "," + format_double(edges[i]) + "]");
  labels.push_back(">" + format_double(edges.back()));
  return labels;
}

std::size_t stratum_of(double score, const std::vector<double>& edges) {
  std::size_t k = 0;
  for (double e : edges) {
    if (score <= e) return k;
    ++k;
  }
  return k;
}

} // namespace

void cmd_rank(const PipelineConfig& cfg, const RunContext& ctx) {
  SurvivalDataset ds = load_from_config(cfg);
  CohortSummary summary = summarize(ds);
  std::cout << "cohort: n=" << summary.n << " events=" << summary.n_events << " ("
            << format_double(100.0 * summary.event_fraction) << "%)\n";
  SplitResult split = split_from_config(cfg, ds);
  VariableRanking ranking = compute_ranking(cfg, ctx, split.train);
  save_ranking(ranking, out_path(ctx, "ranking.csv").string(), provenance_comment(cfg));
  write_provenance(cfg, ctx, "rank", {"ranking.csv"});
  std::cout << "ranking written (" << ranking.entries.size() << " variables)\n";
}

void cmd_derive(const PipelineConfig& cfg, const RunContext& ctx) {
  SurvivalDataset ds = load_from_config(cfg);
  SplitResult split = split_from_config(cfg, ds);

  VariableRanking ranking;
  std::vector<std::string> outputs;
  if (!cfg.ranking_path.empty()) {
    ranking = load_ranking(cfg.ranking_path);
    for (const auto& entry : ranking.entries)
      if (!ds.column_index(entry.name))
        throw ValidationError("ranking variable '" + entry.name + "' is not in the dataset");
  } else {
    ranking = compute_ranking(cfg, ctx, split.train);
    save_ranking(ranking, out_path(ctx, "ranking.csv").string(), provenance_comment(cfg));
    outputs.push_back("ranking.csv");
  }
  if (cfg.m && *cfg.m > ranking.entries.size())
    throw ValidationError("config: m exceeds the number of ranked variables");

  std::uint32_t m_max = cfg.m_max.value_or(static_cast<std::uint32_t>(ranking.entries.size()));
  ParsimonyTable table = run_parsimony(split.train, split.validation, ranking, m_max,
                                       cfg.quantiles, cfg.horizon, ctx.threads);
  const std::uint32_t elbow = select_m(table, SelectionPolicy::elbow, std::nullopt, cfg.epsilon);
  std::cout << "parsimony: elbow suggests m=" << elbow << " (epsilon=" << cfg.epsilon << ")\n";
  const std::uint32_t chosen = select_m(table, cfg.selection, cfg.m, cfg.epsilon);
  table.selected_m = chosen;
  save_parsimony(table, out_path(ctx, "parsimony.csv").string(), provenance_comment(cfg));
  outputs.push_back("parsimony.csv");

  std::vector<std::string> vars;
  for (std::uint32_t v = 0; v < chosen; ++v) vars.push_back(ranking.entries[v].name);
  CutoffSet cutoffs = derive_cutoffs(split.train, vars, cfg.quantiles);
  ScoreDerivation derivation = derive_scores(split.train, vars, cutoffs);
  for (const auto& w : derivation.warnings) std::cout << "warning: " << w << "\n";
  ScoreCard card = normalize_scorecard(derivation.card);
  card.provenance.seed = cfg.seed;
  card.provenance.config_hash = config_hash(cfg);

  if (!cfg.cutoff_overrides.empty()) {
    for (const auto& [name, cuts] : cfg.cutoff_overrides) {
      (void)cuts;
      if (std::find(vars.begin(), vars.end(), name) == vars.end())
        throw ValidationError("cutoff override for '" + name +
                              "', which is not among the selected variables");
    }
    card = fine_tune(card, cfg.cutoff_overrides, split.train);
  }

  save_scorecard_csv(card, out_path(ctx, "scorecard.csv").string());
  save_scorecard_json(card, out_path(ctx, "scorecard.json").string());
  outputs.push_back("scorecard.csv");
  outputs.push_back("scorecard.json");
  write_provenance(cfg, ctx, "derive", outputs);
  std::cout << "scorecard: m=" << chosen << " max_total=" << card.max_total << "\n";
}

void cmd_evaluate(const PipelineConfig& cfg, const RunContext& ctx) {
  if (cfg.card_path.empty()) throw ValidationError("config: card path is required for evaluate");
  ScoreCard card = load_scorecard(cfg.card_path);
  SurvivalDataset ds = load_from_config(cfg);
  SplitResult split = split_from_config(cfg, ds);
  const SurvivalDataset& test = split.test;

  std::vector<int> int_scores = score_all(card, test);
  std::vector<double> scores(int_scores.begin(), int_scores.end());

  double horizon = cfg.horizon.value_or(0.0);
  if (!cfg.horizon) {
    for (std::size_t i = 0; i < test.n(); ++i)
      if (test.status[i]) horizon = std::max(horizon, test.times[i]);
  }
  for (double t : cfg.evaluation_times)
    if (t > horizon)
      throw ValidationError("evaluation time " + format_double(t) + " exceeds the horizon " +
                            format_double(horizon));

  const auto orientation = RiskOrientation::higher_is_riskier;
  MetricsReport report;
  report.m = card.variables.size();
  report.n = test.n();
  report.n_events = test.n_events();
  report.horizon = horizon;

  auto resampled = [&](std::span<const std::uint32_t> rows, auto&& fn) {
    std::vector<double> s(rows.size()), t(rows.size());
    std::vector<std::uint8_t> st(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      s[i] = scores[rows[i]];
      t[i] = test.times[rows[i]];
      st[i] = test.status[rows[i]];
    }
    return fn(s, t, st);
  };

  std::size_t metric_index = 0;
  auto with_ci = [&](auto&& point_fn) {
    MetricWithCi out;
    out.estimate = point_fn(scores, test.times, test.status);
    BootstrapCi ci = bootstrap_ci(
        [&](std::span<const std::uint32_t> rows) {
          return resampled(rows, point_fn);
        },
        test.n(), cfg.bootstrap_resamples, cfg.bootstrap_level,
        derive_seed(cfg.seed, {rng_stream::bootstrap, metric_index}), ctx.threads);
    ++metric_index;
    if (ci.high_failure_rate())
      std::cout << "warning: " << ci.n_failed << "/" << ci.n_total
                << " bootstrap resamples failed for a metric\n";
    out.lower = ci.lower;
    out.upper = ci.upper;
    return out;
  };

  report.concordance = with_ci([&](std::span<const double> s, std::span<const double> t,
                                   std::span<const std::uint8_t> st) {
    return c_index(s, t, st, orientation);
  });
  report.integrated_auc = with_ci([&](std::span<const double> s, std::span<const double> t,
                                      std::span<const std::uint8_t> st) {
    return iauc(s, t, st, horizon, orientation);
  });
  for (double eval_t : cfg.evaluation_times) {
    report.auc.emplace_back(eval_t,
                            with_ci([&, eval_t](std::span<const double> s, std::span<const double> t,
                                                std::span<const std::uint8_t> st) {
                              return auc_at(s, t, st, eval_t, orientation);
                            }));
  }

  // Risk strata (Table-3 shape) with per-stratum KM curves.
  RiskStrataReport strata;
  const std::vector<std::string> labels = strata_labels(cfg.strata_edges);
  std::vector<std::vector<std::size_t>> members(labels.size());
  for (std::size_t i = 0; i < test.n(); ++i)
    members[stratum_of(scores[i], cfg.strata_edges)].push_back(i);
  std::vector<SurvSample> groups;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    RiskStrataReport::Stratum row;
    row.label = labels[s];
    row.n = members[s].size();
    row.percent = 100.0 * static_cast<double>(row.n) / static_cast<double>(test.n());
    if (row.n > 0) {
      SurvSample sample;
      for (std::size_t i : members[s]) {
        sample.times.push_back(test.times[i]);
        sample.status.push_back(test.status[i]);
      }
      row.km = km_fit(sample.times, sample.status);
      row.p10 = km_percentile(row.km, 0.10);
      row.p25 = km_percentile(row.km, 0.25);
      row.median = km_percentile(row.km, 0.50);
      for (double t : cfg.evaluation_times) row.survival_at.push_back(km_survival_at(row.km, t));
      groups.push_back(std::move(sample));
    }
    strata.strata.push_back(std::move(row));
  }
  if (groups.size() >= 2) {
    try {
      strata.logrank = logrank_test(groups);
    } catch (const Error&) {
      strata.logrank = std::nullopt; // e.g. zero events across strata
    }
  }

  // metrics.json: the report plus the cross-strata log-rank test.
  {
    std::ofstream out(out_path(ctx, "metrics.json"));
    if (!out) throw IoError("cannot write metrics.json");
    json j = json::parse(report.to_json());
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    if (strata.logrank)
      j["strata_logrank"] = {{"statistic", strata.logrank->statistic},
                             {"p_value", strata.logrank->p_value}};
    else
      j["strata_logrank"] = nullptr;
    out << j.dump(2) << "\n";
  }

  std::vector<std::string> outputs = {"metrics.json", "strata.csv"};
  {
    std::ofstream out(out_path(ctx, "strata.csv"));
    if (!out) throw IoError("cannot write strata.csv");
    out << "# " << provenance_comment(cfg) << "\n";
    out << "stratum,n,percent,p10,p25,median";
    for (double t : cfg.evaluation_times) out << ",survival_at_" << format_double(t);
    out << "\n";
    auto fmt_pct = [&](const std::optional<double>& p) {
      return p ? format_double(*p) : format_double(horizon) + "+";
    };
    for (const auto& row : strata.strata) {
      out << csv_escape(row.label) << "," << row.n << "," << format_double(row.percent);
      if (row.n == 0) {
        out << ",,,";
        for (std::size_t i = 0; i < cfg.evaluation_times.size(); ++i) out << ",";
      } else {
        out << "," << fmt_pct(row.p10) << "," << fmt_pct(row.p25) << "," << fmt_pct(row.median);
        for (double s : row.survival_at) out << "," << format_double(s);
      }
      out << "\n";
    }
  }
  for (const auto& row : strata.strata) {
    if (row.n == 0) continue;
    const std::string name = "km_" + sanitize_label(row.label) + ".csv";
    save_km_curve(row.km, out_path(ctx, name).string(), provenance_comment(cfg));
    outputs.push_back(name);
  }
  write_provenance(cfg, ctx, "evaluate", outputs);
  std::cout << "metrics: c_index=" << format_double(report.concordance.estimate)
            << " iauc=" << format_double(report.integrated_auc.estimate) << " (n=" << report.n
            << ")\n";
}

void cmd_score(const std::string& card_path, const std::string& patients_path,
               const std::string& out_path_str) {
  ScoreCard card = load_scorecard(card_path);
  std::vector<std::pair<std::string, ColumnKind>> wanted;
  for (const auto& var : card.variables) wanted.emplace_back(var.name, var.kind);
  PatientTable table = load_patient_table(patients_path, wanted);
  std::ofstream out(out_path_str);
  if (!out) throw IoError("cannot write file: " + out_path_str);
  out << "# config=" << (card.provenance.config_hash.empty() ? "-" : card.provenance.config_hash)
      << " seed=" << card.provenance.seed << "\n";
  out << "row,score\n";
  for (std::size_t i = 0; i < table.n; ++i)
    out << (i + 1) << "," << score_patient(card, table, i) << "\n";
  if (!out) throw IoError("write failed: " + out_path_str);
  std::cout << "scored " << table.n << " patients\n";
}

void cmd_synth(const SynthSpec& spec, const std::string& out_path_str) {
  SurvivalDataset ds = generate_synthetic(spec);
  const std::string truth = synth_truth_json(spec);
  save_dataset(ds, out_path_str,
               "config=" + hex64(fnv1a(truth)) + " seed=" + std::to_string(spec.seed));
  std::ofstream sidecar(out_path_str + ".truth.json");
  if (!sidecar) throw IoError("cannot write truth sidecar");
  sidecar << truth << "\n";
  CohortSummary summary = summarize(ds);
  std::cout << "synth: n=" << summary.n << " events=" << summary.n_events << " ("
            << format_double(100.0 * summary.event_fraction) << "%)\n";
}

} // namespace survscore
