#include "survscore/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"
#include "survscore/metrics.hpp"
#include "survscore/parallel.hpp"
#include "survscore/rng.hpp"

namespace survscore {

namespace {

struct CovariateView {
  ColumnKind kind;
  const double* numeric = nullptr;
  const std::int32_t* codes = nullptr;
  std::int32_t n_labels = 0;
};

std::vector<CovariateView> make_views(const SurvivalDataset& ds) {
  std::vector<CovariateView> views;
  views.reserve(ds.columns.size());
  for (const auto& col : ds.columns) {
    CovariateView v;
    v.kind = col.kind;
    if (col.kind == ColumnKind::continuous) {
      v.numeric = col.numeric.data();
    } else {
      v.codes = col.codes.data();
      v.n_labels = static_cast<std::int32_t>(col.labels.size());
    }
    views.push_back(v);
  }
  return views;
}

// Per-node split-search workspace, reused across nodes of a tree.
struct NodeScratch {
  std::vector<double> grid;      // distinct event times in the node
  std::vector<std::uint32_t> uidx; // per row position: #grid knots <= row time
  std::vector<std::uint8_t> ev;
  std::vector<double> d_tot;     // events per knot
  std::vector<double> cnt_tot;   // rows per uidx value (0..T)
  std::vector<double> r_tot;     // at-risk per knot
  std::vector<double> d_left;
  std::vector<double> cnt_left;
  std::vector<double> r_left;
  std::vector<std::pair<double, std::uint32_t>> sorted_values; // (value, position)
  std::vector<double> cuts;
  double node_events = 0.0;

  void prepare(std::span<const std::uint32_t> rows, const std::vector<double>& times,
               const std::vector<std::uint8_t>& status) {
    const std::size_t m = rows.size();
    grid.clear();
    for (std::uint32_t r : rows)
      if (status[r]) grid.push_back(times[r]);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const std::size_t T = grid.size();

    uidx.resize(m);
    ev.resize(m);
    d_tot.assign(T, 0.0);
    cnt_tot.assign(T + 1, 0.0);
    r_tot.assign(T, 0.0);
    d_left.assign(T, 0.0);
    cnt_left.assign(T + 1, 0.0);
    r_left.assign(T, 0.0);
    node_events = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint32_t r = rows[i];
      auto u = static_cast<std::uint32_t>(
          std::upper_bound(grid.begin(), grid.end(), times[r]) - grid.begin());
      uidx[i] = u;
      ev[i] = status[r];
      cnt_tot[u] += 1.0;
      if (status[r]) {
        d_tot[u - 1] += 1.0;
        node_events += 1.0;
      }
    }
    double suffix = 0.0;
    for (std::size_t k = T; k-- > 0;) {
      suffix += cnt_tot[k + 1];
      r_tot[k] = suffix;
    }
  }

  void reset_left() {
    std::fill(d_left.begin(), d_left.end(), 0.0);
    std::fill(cnt_left.begin(), cnt_left.end(), 0.0);
  }

  void add_left(std::size_t position) {
    cnt_left[uidx[position]] += 1.0;
    if (ev[position]) d_left[uidx[position] - 1] += 1.0;
  }

  // Two-sample log-rank chi-squared for the current left assignment.
  double logrank_statistic() {
    const std::size_t T = grid.size();
    double suffix = 0.0;
    for (std::size_t k = T; k-- > 0;) {
      suffix += cnt_left[k + 1];
      r_left[k] = suffix;
    }
    double u_sum = 0.0, v_sum = 0.0;
    for (std::size_t k = 0; k < T; ++k) {
      const double d = d_tot[k];
      const double r = r_tot[k];
      const double rl = r_left[k];
      u_sum += d_left[k] - d * rl / r;
      if (r > 1.0) {
        const double frac = rl / r;
        v_sum += d * (r - d) / (r - 1.0) * frac * (1.0 - frac);
      }
    }
    return v_sum > 0.0 ? u_sum * u_sum / v_sum : 0.0;
  }

  StepFunction leaf_chf() const {
    StepFunction chf;
    chf.initial_value = 0.0;
    chf.knots = grid;
    chf.values.resize(grid.size());
    double cum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      cum += d_tot[k] / r_tot[k];
      chf.values[k] = cum;
    }
    return chf;
  }
};

std::optional<SplitChoice> find_best_split(const std::vector<CovariateView>& views,
                                           const std::vector<double>& times,
                                           const std::vector<std::uint8_t>& status,
                                           std::span<const std::uint32_t> rows,
                                           std::span<const std::uint32_t> candidate_vars,
                                           const SplitConstraints& constraints,
                                           NodeScratch& scratch) {
  scratch.prepare(rows, times, status);
  const double min_ev = static_cast<double>(constraints.min_node_events);
  if (scratch.node_events < 2.0 * min_ev) return std::nullopt;

  std::optional<SplitChoice> best;
  const std::size_t m = rows.size();

  for (std::uint32_t var : candidate_vars) {
    const CovariateView& view = views[var];
    if (view.kind == ColumnKind::continuous) {
      auto& vals = scratch.sorted_values;
      vals.clear();
      for (std::size_t i = 0; i < m; ++i)
        vals.emplace_back(view.numeric[rows[i]], static_cast<std::uint32_t>(i));
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      auto& cuts = scratch.cuts;
      cuts.clear();
      for (std::size_t i = 1; i < m; ++i)
        if (vals[i].first > vals[i - 1].first)
          cuts.push_back(vals[i - 1].first + 0.5 * (vals[i].first - vals[i - 1].first));
      if (cuts.empty()) continue;
      if (constraints.max_candidate_cuts > 0 && cuts.size() > constraints.max_candidate_cuts) {
        // Evenly spaced order statistics of the midpoint list.
        std::vector<double> thinned;
        thinned.reserve(constraints.max_candidate_cuts);
        const std::size_t c = cuts.size();
        const std::size_t k = constraints.max_candidate_cuts;
        for (std::size_t j = 1; j <= k; ++j) {
          std::size_t idx = j * c / (k + 1);
          if (idx >= c) idx = c - 1;
          if (thinned.empty() || cuts[idx] > thinned.back()) thinned.push_back(cuts[idx]);
        }
        cuts = std::move(thinned);
      }

      scratch.reset_left();
      double events_left = 0.0, rows_left = 0.0;
      std::size_t pos = 0;
      for (double cut : cuts) {
        while (pos < m && vals[pos].first < cut) {
          scratch.add_left(vals[pos].second);
          if (scratch.ev[vals[pos].second]) events_left += 1.0;
          rows_left += 1.0;
          ++pos;
        }
        if (events_left < min_ev || scratch.node_events - events_left < min_ev) continue;
        const double stat = scratch.logrank_statistic();
        if (!best || stat > best->statistic) {
          best = SplitChoice{var, false, cut, -1, stat};
        }
      }
    } else {
      for (std::int32_t code = 0; code < view.n_labels; ++code) {
        scratch.reset_left();
        double events_left = 0.0, rows_left = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (view.codes[rows[i]] == code) {
            scratch.add_left(i);
            if (scratch.ev[i]) events_left += 1.0;
            rows_left += 1.0;
          }
        }
        if (rows_left == 0.0 || rows_left == static_cast<double>(m)) continue;
        if (events_left < min_ev || scratch.node_events - events_left < min_ev) continue;
        const double stat = scratch.logrank_statistic();
        if (!best || stat > best->statistic) {
          best = SplitChoice{var, true, 0.0, code, stat};
        }
      }
    }
  }
  return best;
}

struct PendingNode {
  std::int32_t node;
  std::size_t begin, end;
  std::uint32_t depth;
};

void grow_tree(SurvivalTree& tree, const SurvivalDataset& train,
               const std::vector<CovariateView>& views, const ForestParams& params,
               std::uint32_t mtry, const std::vector<double>& event_grid,
               std::uint64_t tree_seed) {
  const std::size_t n = train.n();
  const std::uint32_t p = static_cast<std::uint32_t>(views.size());
  Rng rng(tree_seed);

  tree.inbag_rows.clear();
  tree.oob_rows.clear();
  if (params.bootstrap) {
    std::vector<std::uint8_t> drawn(n, 0);
    tree.inbag_rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = static_cast<std::uint32_t>(rng.next_below(n));
      tree.inbag_rows.push_back(r);
      drawn[r] = 1;
    }
    for (std::uint32_t r = 0; r < n; ++r)
      if (!drawn[r]) tree.oob_rows.push_back(r);
  } else {
    tree.inbag_rows.resize(n);
    std::iota(tree.inbag_rows.begin(), tree.inbag_rows.end(), std::uint32_t{0});
  }

  std::vector<std::uint32_t> row_buf = tree.inbag_rows;
  NodeScratch scratch;

  tree.nodes.clear();
  tree.nodes.emplace_back();
  std::vector<PendingNode> queue;
  queue.push_back({0, 0, row_buf.size(), 0});

  auto make_leaf = [&](std::int32_t node, std::size_t begin, std::size_t end) {
    scratch.prepare(std::span<const std::uint32_t>(row_buf.data() + begin, end - begin),
                    train.times, train.status);
    tree.nodes[static_cast<std::size_t>(node)].leaf = static_cast<std::int32_t>(tree.leaf_chfs.size());
    StepFunction chf = scratch.leaf_chf();
    // Mortality over the forest event grid, used by OOB error and ranking.
    double mortality = 0.0;
    std::size_t j = 0;
    double value = chf.initial_value;
    for (double t : event_grid) {
      while (j < chf.knots.size() && chf.knots[j] <= t) value = chf.values[j++];
      mortality += value;
    }
    tree.leaf_chfs.push_back(std::move(chf));
    tree.leaf_mortality.push_back(mortality);
  };

  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const PendingNode item = queue[qi];
    const std::size_t count = item.end - item.begin;
    std::size_t events = 0;
    for (std::size_t i = item.begin; i < item.end; ++i)
      if (train.status[row_buf[i]]) ++events;

    const bool depth_capped = params.max_depth > 0 && item.depth >= params.max_depth;
    if (count < params.min_node_size || events < 2 * params.min_node_events || depth_capped) {
      make_leaf(item.node, item.begin, item.end);
      continue;
    }

    std::vector<std::uint32_t> candidates = rng.sample_without_replacement(p, mtry);
    std::sort(candidates.begin(), candidates.end());
    SplitConstraints constraints{params.min_node_size, params.min_node_events,
                                 params.max_candidate_cuts};
    auto choice = find_best_split(views, train.times, train.status,
                                  std::span<const std::uint32_t>(row_buf.data() + item.begin, count),
                                  candidates, constraints, scratch);
    if (!choice) {
      make_leaf(item.node, item.begin, item.end);
      continue;
    }

    auto goes_left = [&](std::uint32_t r) {
      const CovariateView& view = views[choice->var];
      if (choice->categorical) return view.codes[r] == choice->label_code;
      return view.numeric[r] < choice->threshold;
    };
    auto mid_it = std::stable_partition(row_buf.begin() + static_cast<std::ptrdiff_t>(item.begin),
                                        row_buf.begin() + static_cast<std::ptrdiff_t>(item.end),
                                        goes_left);
    const std::size_t mid = static_cast<std::size_t>(mid_it - row_buf.begin());

    TreeNode& node = tree.nodes[static_cast<std::size_t>(item.node)];
    node.var = static_cast<std::int32_t>(choice->var);
    node.threshold = choice->threshold;
    node.label_code = choice->categorical ? choice->label_code : -1;
    node.majority_left = (mid - item.begin) >= (item.end - mid);
    node.left = static_cast<std::int32_t>(tree.nodes.size());
    node.right = node.left + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    queue.push_back({node.left, item.begin, mid, item.depth + 1});
    queue.push_back({node.right, mid, item.end, item.depth + 1});
  }
}

// Maps forest variables onto a dataset's columns (by name), with label
// recoding for categoricals: dataset code -> forest code, -1 if unseen.
struct Binding {
  std::vector<const Column*> cols;
  std::vector<std::vector<std::int32_t>> recode;
};

Binding bind(const SurvivalForest& forest, const SurvivalDataset& ds) {
  Binding b;
  b.cols.resize(forest.variable_names.size());
  b.recode.resize(forest.variable_names.size());
  for (std::size_t v = 0; v < forest.variable_names.size(); ++v) {
    auto idx = ds.column_index(forest.variable_names[v]);
    if (!idx)
      throw ValidationError("forest: dataset lacks column '" + forest.variable_names[v] + "'");
    const Column& col = ds.columns[*idx];
    if (col.kind != forest.variable_kinds[v])
      throw ValidationError("forest: column '" + forest.variable_names[v] + "' kind mismatch");
    b.cols[v] = &col;
    if (col.kind == ColumnKind::categorical) {
      auto& rc = b.recode[v];
      rc.resize(col.labels.size(), -1);
      const auto& flabels = forest.variable_labels[v];
      for (std::size_t c = 0; c < col.labels.size(); ++c) {
        auto it = std::find(flabels.begin(), flabels.end(), col.labels[c]);
        if (it != flabels.end()) rc[c] = static_cast<std::int32_t>(it - flabels.begin());
      }
    }
  }
  return b;
}

std::int32_t route_to_leaf(const SurvivalTree& tree, const Binding& binding, std::size_t row,
                           const ForestPredictOptions& options, std::int32_t override_var = -1,
                           double override_numeric = 0.0, std::int32_t override_code = -1) {
  std::int32_t node_id = 0;
  for (;;) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    if (node.var < 0) return node.leaf;
    const auto v = static_cast<std::size_t>(node.var);
    const Column& col = *binding.cols[v];
    bool left;
    if (col.kind == ColumnKind::continuous) {
      const double x = (node.var == override_var) ? override_numeric : col.numeric[row];
      left = x < node.threshold;
    } else {
      std::int32_t code = (node.var == override_var) ? override_code
                                                     : binding.recode[v][static_cast<std::size_t>(col.codes[row])];
      if (code < 0) {
        if (!options.route_unseen_to_majority)
          throw ValidationError("forest: unseen label for variable '" +
                                std::string(col.name) + "' (enable majority routing to allow)");
        left = node.majority_left;
      } else {
        left = code == node.label_code;
      }
    }
    node_id = left ? node.left : node.right;
  }
}

} // namespace

SurvivalForest grow_forest(const SurvivalDataset& train, const ForestParams& params, int threads) {
  train.validate();
  if (params.n_trees < 1) throw ValidationError("forest: n_trees must be at least 1");
  if (train.n_covariates() == 0) throw ValidationError("forest: no covariates");
  if (train.n_events() == 0) throw NumericError("forest: zero events in training data");

  const auto p = static_cast<std::uint32_t>(train.n_covariates());
  std::uint32_t mtry = params.mtry;
  if (mtry == 0) mtry = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::sqrt(static_cast<double>(p))));
  if (mtry > p) mtry = p;

  SurvivalForest forest;
  forest.params = params;
  forest.mtry_used = mtry;
  for (const auto& col : train.columns) {
    forest.variable_names.push_back(col.name);
    forest.variable_kinds.push_back(col.kind);
    forest.variable_labels.push_back(col.labels);
  }
  for (std::size_t i = 0; i < train.n(); ++i)
    if (train.status[i]) forest.event_time_grid.push_back(train.times[i]);
  std::sort(forest.event_time_grid.begin(), forest.event_time_grid.end());
  forest.event_time_grid.erase(
      std::unique(forest.event_time_grid.begin(), forest.event_time_grid.end()),
      forest.event_time_grid.end());

  const std::vector<CovariateView> views = make_views(train);
  forest.trees.resize(params.n_trees);
  parallel_for(params.n_trees, threads, [&](std::size_t t) {
    grow_tree(forest.trees[t], train, views, params, mtry, forest.event_time_grid,
              derive_seed(params.seed, {rng_stream::tree, t}));
  });
  return forest;
}

std::optional<SplitChoice> best_split(const SurvivalDataset& ds,
                                      std::span<const std::uint32_t> rows,
                                      std::span<const std::uint32_t> candidate_vars,
                                      const SplitConstraints& constraints) {
  if (rows.empty()) throw ValidationError("best_split: no rows");
  for (std::uint32_t v : candidate_vars)
    if (v >= ds.n_covariates()) throw ValidationError("best_split: variable index out of range");
  const std::vector<CovariateView> views = make_views(ds);
  NodeScratch scratch;
  if (rows.size() < constraints.min_node_size) return std::nullopt;
  return find_best_split(views, ds.times, ds.status, rows, candidate_vars, constraints, scratch);
}

StepFunction ensemble_chf(const SurvivalForest& forest, const SurvivalDataset& ds,
                          std::size_t row, const ForestPredictOptions& options) {
  Binding binding = bind(forest, ds);
  std::vector<const StepFunction*> leaves;
  leaves.reserve(forest.trees.size());
  StepFunction out;
  out.initial_value = 0.0;
  for (const auto& tree : forest.trees) {
    std::int32_t leaf = route_to_leaf(tree, binding, row, options);
    leaves.push_back(&tree.leaf_chfs[static_cast<std::size_t>(leaf)]);
    for (double t : leaves.back()->knots) out.knots.push_back(t);
  }
  std::sort(out.knots.begin(), out.knots.end());
  out.knots.erase(std::unique(out.knots.begin(), out.knots.end()), out.knots.end());
  out.values.assign(out.knots.size(), 0.0);
  for (const StepFunction* leaf : leaves) {
    std::size_t j = 0;
    double value = leaf->initial_value;
    for (std::size_t k = 0; k < out.knots.size(); ++k) {
      while (j < leaf->knots.size() && leaf->knots[j] <= out.knots[k]) value = leaf->values[j++];
      out.values[k] += value;
    }
  }
  const double b = static_cast<double>(forest.trees.size());
  for (auto& v : out.values) v /= b;
  return out;
}

double ensemble_mortality(const SurvivalForest& forest, const SurvivalDataset& ds,
                          std::size_t row, const ForestPredictOptions& options) {
  Binding binding = bind(forest, ds);
  double sum = 0.0;
  for (const auto& tree : forest.trees) {
    std::int32_t leaf = route_to_leaf(tree, binding, row, options);
    sum += tree.leaf_mortality[static_cast<std::size_t>(leaf)];
  }
  return sum / static_cast<double>(forest.trees.size());
}

VariableRanking permutation_importance(const SurvivalForest& forest,
                                       const SurvivalDataset& train, int threads) {
  if (!forest.params.bootstrap)
    throw ValidationError("permutation_importance: forest was grown without bootstrap (no OOB)");
  const Binding binding = bind(forest, train);
  const std::size_t p = forest.variable_names.size();
  const std::size_t n_trees = forest.trees.size();
  const ForestPredictOptions options{};

  std::vector<std::vector<double>> delta(n_trees); // [tree][var]
  std::vector<std::uint8_t> valid(n_trees, 0);

  parallel_for(n_trees, threads, [&](std::size_t t) {
    const SurvivalTree& tree = forest.trees[t];
    const auto& oob = tree.oob_rows;
    if (oob.size() < 2) return;
    std::vector<double> times(oob.size());
    std::vector<std::uint8_t> status(oob.size());
    std::vector<double> mortality(oob.size());
    for (std::size_t i = 0; i < oob.size(); ++i) {
      times[i] = train.times[oob[i]];
      status[i] = train.status[oob[i]];
      mortality[i] = tree.leaf_mortality[static_cast<std::size_t>(
          route_to_leaf(tree, binding, oob[i], options))];
    }
    double err_base;
    try {
      err_base = 1.0 - c_index(mortality, times, status, RiskOrientation::higher_is_riskier);
    } catch (const NumericError&) {
      return; // no eligible OOB pairs for this tree
    }
    delta[t].assign(p, 0.0);
    std::vector<std::size_t> perm(oob.size());
    std::vector<double> permuted(oob.size());
    for (std::size_t v = 0; v < p; ++v) {
      Rng rng(derive_seed(forest.params.seed, {rng_stream::importance, t, v}));
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      rng.shuffle(perm);
      const Column& col = *binding.cols[v];
      for (std::size_t i = 0; i < oob.size(); ++i) {
        const std::size_t src = oob[perm[i]];
        if (col.kind == ColumnKind::continuous) {
          permuted[i] = tree.leaf_mortality[static_cast<std::size_t>(route_to_leaf(
              tree, binding, oob[i], options, static_cast<std::int32_t>(v), col.numeric[src], -1))];
        } else {
          std::int32_t code = binding.recode[v][static_cast<std::size_t>(col.codes[src])];
          permuted[i] = tree.leaf_mortality[static_cast<std::size_t>(route_to_leaf(
              tree, binding, oob[i], options, static_cast<std::int32_t>(v), 0.0, code))];
        }
      }
      const double err = 1.0 - c_index(permuted, times, status, RiskOrientation::higher_is_riskier);
      delta[t][v] = err - err_base;
    }
    valid[t] = 1;
  });

  std::vector<double> importance(p, 0.0);
  std::size_t n_valid = 0;
  for (std::size_t t = 0; t < n_trees; ++t) {
    if (!valid[t]) continue;
    ++n_valid;
    for (std::size_t v = 0; v < p; ++v) importance[v] += delta[t][v];
  }
  if (n_valid == 0)
    throw NumericError("permutation_importance: no tree had a usable OOB sample");
  for (auto& x : importance) x /= static_cast<double>(n_valid);

  VariableRanking ranking;
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
  for (std::size_t v : order)
    ranking.entries.push_back({forest.variable_names[v], importance[v]});
  return ranking;
}

void save_ranking(const VariableRanking& ranking, const std::string& path,
                  const std::string& provenance_comment) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  if (!provenance_comment.empty()) out << "# " << provenance_comment << "\n";
  out << "rank,variable,importance\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i)
    out << (i + 1) << "," << csv_escape(ranking.entries[i].name) << ","
        << format_double(ranking.entries[i].importance) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

VariableRanking load_ranking(const std::string& path) {
  CsvTable table = read_csv(path);
  auto var_col = table.column("variable");
  auto imp_col = table.column("importance");
  if (!var_col || !imp_col)
    throw ValidationError(path + ": expected columns 'variable' and 'importance'");
  VariableRanking ranking;
  for (const auto& row : table.rows) {
    auto imp = parse_double(row[*imp_col]);
    if (!imp) throw ValidationError(path + ": bad importance value '" + row[*imp_col] + "'");
    ranking.entries.push_back({row[*var_col], *imp});
  }
  return ranking;
}

std::string SurvivalForest::to_json() const {
  std::ostringstream out;
  out << "{\"n_trees\":" << trees.size() << ",\"mtry\":" << mtry_used << ",\"variables\":[";
  for (std::size_t v = 0; v < variable_names.size(); ++v) {
    if (v) out << ",";
    out << "\"" << variable_names[v] << "\"";
  }
  out << "],\"trees\":[";
  for (std::size_t t = 0; t < trees.size(); ++t) {
    if (t) out << ",";
    out << "{\"nodes\":[";
    for (std::size_t i = 0; i < trees[t].nodes.size(); ++i) {
      const TreeNode& n = trees[t].nodes[i];
      if (i) out << ",";
      if (n.var < 0) {
        out << "{\"leaf\":" << n.leaf << "}";
      } else {
        out << "{\"var\":\"" << variable_names[static_cast<std::size_t>(n.var)] << "\",";
        if (n.label_code >= 0) out << "\"label\":\""
            << variable_labels[static_cast<std::size_t>(n.var)][static_cast<std::size_t>(n.label_code)]
            << "\",";
        else out << "\"threshold\":" << format_double(n.threshold) << ",";
        out << "\"left\":" << n.left << ",\"right\":" << n.right << "}";
      }
    }
    out << "]}";
  }
  out << "]}";
  return out.str();
}

} // namespace survscore
