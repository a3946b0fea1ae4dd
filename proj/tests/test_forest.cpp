#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "survscore/errors.hpp"
#include "survscore/forest.hpp"
#include "survscore/nonparametric.hpp"
#include "survscore/rng.hpp"
#include "survscore/synth.hpp"

using namespace survscore;

namespace {

SurvivalDataset make_dataset(std::vector<double> times, std::vector<std::uint8_t> status,
                             std::vector<Column> columns) {
  SurvivalDataset ds;
  ds.times = std::move(times);
  ds.status = std::move(status);
  ds.columns = std::move(columns);
  ds.validate();
  return ds;
}

Column continuous(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::continuous;
  c.numeric = std::move(values);
  return c;
}

bool same_forest(const SurvivalForest& a, const SurvivalForest& b) {
  if (a.trees.size() != b.trees.size()) return false;
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    const auto& ta = a.trees[t];
    const auto& tb = b.trees[t];
    if (ta.inbag_rows != tb.inbag_rows || ta.oob_rows != tb.oob_rows) return false;
    if (ta.nodes.size() != tb.nodes.size()) return false;
    for (std::size_t i = 0; i < ta.nodes.size(); ++i) {
      const auto& na = ta.nodes[i];
      const auto& nb = tb.nodes[i];
      if (na.var != nb.var || na.threshold != nb.threshold || na.label_code != nb.label_code ||
          na.left != nb.left || na.right != nb.right)
        return false;
    }
    if (ta.leaf_chfs.size() != tb.leaf_chfs.size()) return false;
    for (std::size_t i = 0; i < ta.leaf_chfs.size(); ++i)
      if (ta.leaf_chfs[i].knots != tb.leaf_chfs[i].knots ||
          ta.leaf_chfs[i].values != tb.leaf_chfs[i].values)
        return false;
  }
  return true;
}

} // namespace

TEST_CASE("best_split picks a perfectly separating binary covariate") {
  // Covariate 1 sends all four events left and the censored rows right.
  auto ds = make_dataset({1, 2, 3, 4, 10, 11, 12, 13},
                         {1, 1, 1, 1, 0, 0, 0, 0},
                         {continuous("z", {1, 1, 1, 1, 0, 0, 0, 0})});
  std::vector<std::uint32_t> rows = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<std::uint32_t> vars = {0};
  SplitConstraints constraints{2, 0, 0};
  auto choice = best_split(ds, rows, vars, constraints);
  REQUIRE(choice.has_value());
  CHECK(choice->var == 0);
  CHECK(choice->threshold == 0.5);
  const double ref = oracle::logrank_two_group({10, 11, 12, 13}, {0, 0, 0, 0},
                                               {1, 2, 3, 4}, {1, 1, 1, 1});
  CHECK(choice->statistic == doctest::Approx(ref).epsilon(1e-12));
  // Delegate oracle: the library's own k-sample test agrees on the children.
  auto lr = logrank_test({{{10, 11, 12, 13}, {0, 0, 0, 0}}, {{1, 2, 3, 4}, {1, 1, 1, 1}}});
  CHECK(choice->statistic == doctest::Approx(lr.statistic).epsilon(1e-12));
}

TEST_CASE("best_split returns none when no admissible cut exists") {
  auto ds = make_dataset({1, 2, 3, 4}, {1, 1, 1, 1}, {continuous("x", {5, 5, 5, 5})});
  std::vector<std::uint32_t> rows = {0, 1, 2, 3};
  std::vector<std::uint32_t> vars = {0};
  CHECK_FALSE(best_split(ds, rows, vars, SplitConstraints{2, 1, 0}).has_value());
}

TEST_CASE("best_split chooses the variable the exhaustive oracle prefers") {
  // Variable a orders survival perfectly; variable b is shuffled.
  std::vector<double> times = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::uint8_t> status(10, 1);
  std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> b = {3, 9, 1, 7, 5, 10, 2, 8, 6, 4};
  auto ds = make_dataset(times, status, {continuous("a", a), continuous("b", b)});
  std::vector<std::uint32_t> rows = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::uint32_t> vars = {0, 1};
  SplitConstraints constraints{2, 1, 0};
  auto choice = best_split(ds, rows, vars, constraints);
  REQUIRE(choice.has_value());

  // Exhaustive enumeration of every midpoint of both variables.
  double best_stat = -1;
  std::uint32_t best_var = 0;
  double best_cut = 0;
  for (std::uint32_t v = 0; v < 2; ++v) {
    const auto& col = v == 0 ? a : b;
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i] == sorted[i - 1]) continue;
      const double cut = sorted[i - 1] + 0.5 * (sorted[i] - sorted[i - 1]);
      std::vector<double> t1, t2;
      std::vector<std::uint8_t> s1, s2;
      for (std::size_t r = 0; r < times.size(); ++r) {
        if (col[r] < cut) { t1.push_back(times[r]); s1.push_back(status[r]); }
        else { t2.push_back(times[r]); s2.push_back(status[r]); }
      }
      std::size_t e1 = std::count(s1.begin(), s1.end(), std::uint8_t{1});
      std::size_t e2 = std::count(s2.begin(), s2.end(), std::uint8_t{1});
      if (e1 < 1 || e2 < 1) continue;
      const double stat = oracle::logrank_two_group(t1, s1, t2, s2);
      if (stat > best_stat) {
        best_stat = stat;
        best_var = v;
        best_cut = cut;
      }
    }
  }
  CHECK(choice->var == best_var);
  CHECK(choice->threshold == best_cut);
  CHECK(choice->statistic == doctest::Approx(best_stat).epsilon(1e-12));
  CHECK(best_var == 0); // sanity: the ordered variable wins
}

TEST_CASE("single-tree forest without bootstrap reproduces hand Nelson-Aalen leaves") {
  auto ds = make_dataset({1, 2, 3, 10, 11, 12}, {1, 1, 1, 1, 1, 1},
                         {continuous("z", {1, 1, 1, 0, 0, 0})});
  ForestParams params;
  params.n_trees = 1;
  params.bootstrap = false;
  params.min_node_size = 2;
  params.min_node_events = 1;
  params.seed = 5;
  auto forest = grow_forest(ds, params);
  REQUIRE(forest.trees.size() == 1);
  const auto& tree = forest.trees[0];
  REQUIRE(tree.nodes.size() == 3); // root split + two leaves
  CHECK(tree.nodes[0].var == 0);
  CHECK(tree.nodes[0].threshold == 0.5);

  auto ref_left = oracle::nelson_aalen({10, 11, 12}, {1, 1, 1}); // z=0 goes left of 0.5
  auto ref_right = oracle::nelson_aalen({1, 2, 3}, {1, 1, 1});
  const auto& left = tree.leaf_chfs[static_cast<std::size_t>(
      tree.nodes[static_cast<std::size_t>(tree.nodes[0].left)].leaf)];
  const auto& right = tree.leaf_chfs[static_cast<std::size_t>(
      tree.nodes[static_cast<std::size_t>(tree.nodes[0].right)].leaf)];
  CHECK(left.knots == ref_left.times);
  CHECK(left.values == ref_left.values);
  CHECK(right.knots == ref_right.times);
  CHECK(right.values == ref_right.values);
}

TEST_CASE("same seed grows an identical forest; different seed does not") {
  SynthSpec spec;
  spec.n = 120;
  spec.normal_coefs = {0.8};
  spec.n_noise_normal = 2;
  spec.censor_rate = 0.05;
  spec.seed = 3;
  auto ds = generate_synthetic(spec);
  ForestParams params;
  params.n_trees = 12;
  params.min_node_size = 10;
  params.seed = 42;
  auto f1 = grow_forest(ds, params);
  auto f2 = grow_forest(ds, params);
  CHECK(same_forest(f1, f2));
  params.seed = 43;
  auto f3 = grow_forest(ds, params);
  CHECK_FALSE(same_forest(f1, f3));
}

TEST_CASE("forest results are identical for any worker count") {
  SynthSpec spec;
  spec.n = 150;
  spec.normal_coefs = {0.7, 0.5};
  spec.n_noise_normal = 2;
  spec.censor_rate = 0.05;
  spec.seed = 4;
  auto ds = generate_synthetic(spec);
  ForestParams params;
  params.n_trees = 16;
  params.min_node_size = 10;
  params.seed = 7;
  auto serial = grow_forest(ds, params, 1);
  auto parallel = grow_forest(ds, params, 8);
  CHECK(same_forest(serial, parallel));
  auto rank_serial = permutation_importance(serial, ds, 1);
  auto rank_parallel = permutation_importance(parallel, ds, 8);
  REQUIRE(rank_serial.entries.size() == rank_parallel.entries.size());
  for (std::size_t i = 0; i < rank_serial.entries.size(); ++i) {
    CHECK(rank_serial.entries[i].name == rank_parallel.entries[i].name);
    CHECK(rank_serial.entries[i].importance == rank_parallel.entries[i].importance);
  }
}

TEST_CASE("every split child satisfies the min_node_events constraint") {
  SynthSpec spec;
  spec.n = 200;
  spec.normal_coefs = {0.9};
  spec.n_noise_normal = 1;
  spec.censor_rate = 0.04;
  spec.seed = 6;
  auto ds = generate_synthetic(spec);
  ForestParams params;
  params.n_trees = 10;
  params.min_node_size = 15;
  params.min_node_events = 3;
  params.seed = 11;
  auto forest = grow_forest(ds, params);
  for (const auto& tree : forest.trees) {
    // Route every inbag row and tally events per node.
    std::vector<std::size_t> events(tree.nodes.size(), 0);
    std::vector<std::size_t> rows(tree.nodes.size(), 0);
    for (std::uint32_t r : tree.inbag_rows) {
      std::int32_t node = 0;
      for (;;) {
        rows[static_cast<std::size_t>(node)] += 1;
        if (ds.status[r]) events[static_cast<std::size_t>(node)] += 1;
        const auto& n = tree.nodes[static_cast<std::size_t>(node)];
        if (n.var < 0) break;
        const auto& col = ds.columns[static_cast<std::size_t>(n.var)];
        node = col.numeric[r] < n.threshold ? n.left : n.right;
      }
    }
    for (const auto& n : tree.nodes) {
      if (n.var < 0) continue;
      CHECK(events[static_cast<std::size_t>(n.left)] >= params.min_node_events);
      CHECK(events[static_cast<std::size_t>(n.right)] >= params.min_node_events);
    }
  }
}

TEST_CASE("ensemble_chf averages the reached leaves") {
  // Two single-leaf trees with constant hazards 1 and 3.
  SurvivalForest forest;
  forest.variable_names = {"x"};
  forest.variable_kinds = {ColumnKind::continuous};
  forest.variable_labels = {{}};
  for (double v : {1.0, 3.0}) {
    SurvivalTree tree;
    TreeNode leaf;
    leaf.leaf = 0;
    tree.nodes.push_back(leaf);
    tree.leaf_chfs.push_back(StepFunction{{1.0}, {v}, 0.0});
    tree.leaf_mortality.push_back(v);
    forest.trees.push_back(std::move(tree));
  }
  auto ds = make_dataset({1}, {1}, {continuous("x", {0.0})});
  auto chf = ensemble_chf(forest, ds, 0);
  REQUIRE(chf.knots == std::vector<double>{1.0});
  CHECK(chf.values[0] == 2.0);
  CHECK(ensemble_mortality(forest, ds, 0) == 2.0);
}

TEST_CASE("ensemble_chf is non-decreasing and matches a one-tree forest's leaf") {
  SynthSpec spec;
  spec.n = 80;
  spec.normal_coefs = {1.0};
  spec.censor_rate = 0.05;
  spec.seed = 9;
  auto ds = generate_synthetic(spec);
  ForestParams params;
  params.n_trees = 5;
  params.min_node_size = 10;
  params.min_node_events = 2;
  params.seed = 21;
  auto forest = grow_forest(ds, params);
  for (std::size_t row : {std::size_t{0}, std::size_t{7}, std::size_t{33}}) {
    auto chf = ensemble_chf(forest, ds, row);
    double prev = 0.0;
    for (double v : chf.values) {
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("unseen categorical labels: error by default, majority routing on request") {
  Column cat;
  cat.name = "g";
  cat.kind = ColumnKind::categorical;
  cat.labels = {"a", "b"};
  cat.codes = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  auto ds = make_dataset({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12},
                         {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, {cat});
  ForestParams params;
  params.n_trees = 3;
  params.min_node_size = 2;
  params.min_node_events = 1;
  params.seed = 2;
  auto forest = grow_forest(ds, params);

  Column cat2 = cat;
  cat2.labels = {"a", "b", "zzz"};
  cat2.codes[3] = 2;
  auto ds2 = make_dataset(ds.times, ds.status, {cat2});
  CHECK_THROWS_WITH_AS(ensemble_mortality(forest, ds2, 3), doctest::Contains("unseen label"),
                       ValidationError);
  ForestPredictOptions majority;
  majority.route_unseen_to_majority = true;
  CHECK(std::isfinite(ensemble_mortality(forest, ds2, 3, majority)));
}

TEST_CASE("permutation importance: constant variable scores exactly zero") {
  SynthSpec spec;
  spec.n = 150;
  spec.normal_coefs = {0.9};
  spec.censor_rate = 0.04;
  spec.seed = 12;
  auto ds = generate_synthetic(spec);
  ds.columns.push_back(continuous("flat", std::vector<double>(ds.n(), 7.0)));
  ForestParams params;
  params.n_trees = 15;
  params.min_node_size = 10;
  params.seed = 31;
  auto forest = grow_forest(ds, params);
  auto ranking = permutation_importance(forest, ds);
  bool found = false;
  for (const auto& e : ranking.entries) {
    if (e.name == "flat") {
      CHECK(e.importance == 0.0);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("permutation importance puts the informative variable first") {
  SynthSpec spec;
  spec.n = 500;
  spec.normal_coefs = {1.2};
  spec.n_noise_normal = 4;
  spec.censor_rate = 0.03;
  spec.seed = 13;
  auto ds = generate_synthetic(spec);
  ForestParams params;
  params.n_trees = 40;
  params.max_candidate_cuts = 32;
  params.seed = 77;
  auto forest = grow_forest(ds, params);
  auto ranking = permutation_importance(forest, ds);
  REQUIRE(ranking.entries.size() == 5);
  CHECK(ranking.entries[0].name == "x1");
  CHECK(ranking.entries[0].importance > 0.0);
  auto again = permutation_importance(forest, ds);
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    CHECK(again.entries[i].name == ranking.entries[i].name);
    CHECK(again.entries[i].importance == ranking.entries[i].importance);
  }
}

TEST_CASE("a covariate that deterministically orders survival attains maximum importance") {
  const std::size_t n = 200;
  Rng rng(55);
  std::vector<double> times(n), driver(n), other(n);
  std::vector<std::uint8_t> status(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    driver[i] = rng.next_normal();
    times[i] = 100.0 - 10.0 * driver[i] + 200.0; // strictly decreasing in driver
    other[i] = rng.next_normal();
  }
  auto ds = make_dataset(times, status, {continuous("driver", driver), continuous("other", other)});
  ForestParams params;
  params.n_trees = 25;
  params.min_node_size = 10;
  params.seed = 8;
  auto forest = grow_forest(ds, params);
  auto ranking = permutation_importance(forest, ds);
  CHECK(ranking.entries[0].name == "driver");
  CHECK(ranking.entries[0].importance > ranking.entries[1].importance);
}

TEST_CASE("importance requires OOB data; mtry defaults to floor(sqrt(p))") {
  SynthSpec spec;
  spec.n = 60;
  spec.normal_coefs = {0.5};
  spec.seed = 14;
  auto ds = generate_synthetic(spec);
  ForestParams params;
  params.n_trees = 2;
  params.bootstrap = false;
  params.min_node_size = 10;
  auto forest = grow_forest(ds, params);
  CHECK(forest.mtry_used == 1); // floor(sqrt(1))
  CHECK_THROWS_AS(permutation_importance(forest, ds), ValidationError);
  CHECK_THROWS_AS(grow_forest(make_dataset({1, 2}, {0, 0}, {continuous("x", {0, 1})}), params),
                  NumericError);
}

TEST_CASE("ranking round-trips through CSV") {
  VariableRanking ranking;
  ranking.entries = {{"age", 0.031}, {"lactate", 0.012}, {"noise", -0.001}};
  const std::string path = "/tmp/survscore_ranking_test.csv";
  save_ranking(ranking, path, "config=test seed=0");
  auto back = load_ranking(path);
  REQUIRE(back.entries.size() == 3);
  CHECK(back.entries[0].name == "age");
  CHECK(back.entries[2].importance == -0.001);
  std::remove(path.c_str());
}
