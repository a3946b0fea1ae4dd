#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sys/wait.h>

#include "survscore/csv.hpp"
#include "survscore/dataset.hpp"
#include "survscore/errors.hpp"
#include "survscore/pipeline.hpp"
#include "survscore/rng.hpp"
#include "survscore/scorecard.hpp"
#include "test_util.hpp"

using namespace survscore;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SURVSCORE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string pipeline_config(const std::string& data_path, std::uint64_t seed,
                            const std::string& extra = "") {
  return std::string("{\n") +
         "  \"data\": {\"path\": \"" + data_path + "\"},\n" +
         "  \"split\": {\"ratios\": [0.6, 0.2, 0.2]},\n" +
         "  \"forest\": {\"n_trees\": 40, \"max_candidate_cuts\": 16, \"min_node_size\": 10},\n" +
         "  \"selection\": {\"m\": 2},\n" +
         "  \"evaluation\": {\"times\": [2, 5], \"horizon\": 20,\n" +
         "                   \"bootstrap\": {\"resamples\": 30, \"level\": 0.95}},\n" +
         "  \"seed\": " + std::to_string(seed) + (extra.empty() ? "" : ",\n" + extra) + "\n}\n";
}

void make_data(const std::string& path, std::uint64_t seed, std::size_t n = 320) {
  SynthSpec spec;
  spec.n = n;
  spec.normal_coefs = {1.0, 0.7};
  spec.n_noise_normal = 2;
  spec.n_noise_categorical = 1;
  spec.censor_rate = 0.04;
  spec.seed = seed;
  cmd_synth(spec, path);
}

std::vector<std::string> output_files(const std::string& dir) {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

} // namespace

TEST_CASE("cmd_synth is deterministic and self-describing") {
  TempDir dir;
  make_data(dir.file("a.csv"), 5);
  make_data(dir.file("b.csv"), 5);
  CHECK(read_file(dir.file("a.csv")) == read_file(dir.file("b.csv")));
  make_data(dir.file("c.csv"), 6);
  CHECK(read_file(dir.file("a.csv")) != read_file(dir.file("c.csv")));
  CHECK(std::filesystem::exists(dir.file("a.csv.truth.json")));
}

TEST_CASE("derive emits a normalized card and parsimony table; evaluate emits reports") {
  TempDir dir;
  make_data(dir.file("data.csv"), 41);
  write_file(dir.file("cfg.json"), pipeline_config(dir.file("data.csv"), 77));
  PipelineConfig cfg = load_config(dir.file("cfg.json"));
  RunContext ctx{dir.file("out"), 1};

  cmd_derive(cfg, ctx);
  auto card = load_scorecard(dir.file("out/scorecard.json"));
  CHECK(card.max_total == 100);
  CHECK(card.variables.size() == 2);
  CHECK(card.provenance.seed == 77);
  CHECK(card.provenance.config_hash == config_hash(cfg));

  auto parsimony = read_csv(dir.file("out/parsimony.csv"));
  CHECK(parsimony.rows.size() == 5); // p = 5 covariates

  cfg.card_path = dir.file("out/scorecard.json");
  cmd_evaluate(cfg, ctx);
  CHECK(std::filesystem::exists(dir.file("out/metrics.json")));
  auto strata = read_csv(dir.file("out/strata.csv"));
  CHECK(strata.header[0] == "stratum");
  CHECK(strata.rows.size() == 6); // default Table-3 bins
  double percent_sum = 0;
  auto pct = strata.column("percent");
  for (const auto& row : strata.rows) percent_sum += *parse_double(row[*pct]);
  CHECK(std::abs(percent_sum - 100.0) <= 0.1);

  const std::string metrics = read_file(dir.file("out/metrics.json"));
  CHECK(metrics.find("\"c_index\"") != std::string::npos);
  CHECK(metrics.find("\"iauc\"") != std::string::npos);
  CHECK(metrics.find("\"strata_logrank\"") != std::string::npos);
}

TEST_CASE("identity cutoff overrides reproduce the card byte for byte") {
  TempDir dir;
  make_data(dir.file("data.csv"), 42);
  write_file(dir.file("cfg.json"), pipeline_config(dir.file("data.csv"), 7));
  PipelineConfig cfg = load_config(dir.file("cfg.json"));
  cmd_derive(cfg, RunContext{dir.file("out1"), 1});
  auto card = load_scorecard(dir.file("out1/scorecard.json"));

  // Same derivation with the derived cuts supplied as explicit overrides.
  PipelineConfig cfg2 = cfg;
  for (const auto& var : card.variables)
    if (var.kind == ColumnKind::continuous) cfg2.cutoff_overrides.emplace_back(var.name, var.cuts);
  cmd_derive(cfg2, RunContext{dir.file("out2"), 1});
  auto card2 = load_scorecard(dir.file("out2/scorecard.json"));
  REQUIRE(card2.variables.size() == card.variables.size());
  for (std::size_t v = 0; v < card.variables.size(); ++v) {
    CHECK(card2.variables[v].cuts == card.variables[v].cuts);
    for (std::size_t e = 0; e < card.variables[v].entries.size(); ++e)
      CHECK(card2.variables[v].entries[e].score == card.variables[v].entries[e].score);
  }
}

TEST_CASE("m larger than p is rejected") {
  TempDir dir;
  make_data(dir.file("data.csv"), 43);
  write_file(dir.file("cfg.json"), pipeline_config(dir.file("data.csv"), 8));
  PipelineConfig cfg = load_config(dir.file("cfg.json"));
  cfg.m = 99;
  CHECK_THROWS_AS(cmd_derive(cfg, RunContext{dir.file("out"), 1}), ValidationError);
}

TEST_CASE("full pipeline outputs are byte-identical across runs and worker counts") {
  TempDir dir;
  make_data(dir.file("data.csv"), 44);
  write_file(dir.file("cfg.json"), pipeline_config(dir.file("data.csv"), 9));
  PipelineConfig cfg = load_config(dir.file("cfg.json"));

  auto run_all = [&](const std::string& out, int threads) {
    RunContext ctx{dir.file(out), threads};
    cmd_derive(cfg, ctx);
    PipelineConfig eval_cfg = cfg;
    eval_cfg.card_path = dir.file(out + "/scorecard.json");
    cmd_evaluate(eval_cfg, ctx);
  };
  run_all("out_a", 1);
  run_all("out_b", 4);

  auto names_a = output_files(dir.file("out_a"));
  auto names_b = output_files(dir.file("out_b"));
  REQUIRE(names_a == names_b);
  for (const auto& name : names_a) {
    if (name == "metrics.json" || name == "provenance.json" || name.rfind("km_", 0) == 0 ||
        name == "strata.csv")
      continue; // these embed the card path via the config hash
    CHECK(read_file(dir.file("out_a/" + name)) == read_file(dir.file("out_b/" + name)));
  }
  // Evaluation outputs, modulo the embedded config hash, must also agree.
  auto strip_hash = [](std::string text) {
    for (std::string::size_type pos = 0; (pos = text.find("config", pos)) != std::string::npos;) {
      auto eol = text.find('\n', pos);
      text.erase(pos, eol - pos);
    }
    return text;
  };
  for (const auto& name : names_a)
    if (name == "metrics.json" || name.rfind("km_", 0) == 0 || name == "strata.csv")
      CHECK(strip_hash(read_file(dir.file("out_a/" + name))) ==
            strip_hash(read_file(dir.file("out_b/" + name))));
}

TEST_CASE("evaluation never reads the training split") {
  TempDir dir;
  make_data(dir.file("data.csv"), 45);
  write_file(dir.file("cfg.json"), pipeline_config(dir.file("data.csv"), 10));
  PipelineConfig cfg = load_config(dir.file("cfg.json"));
  cmd_derive(cfg, RunContext{dir.file("out"), 1});
  cfg.card_path = dir.file("out/scorecard.json");
  cmd_evaluate(cfg, RunContext{dir.file("eval1"), 1});

  // Corrupt every train/validation row's covariates and times in the file;
  // row-to-split assignment depends only on (seed, n, ratios).
  LoadOptions opt;
  auto ds = load_dataset(dir.file("data.csv"), opt);
  const std::size_t n = ds.n();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffler(derive_seed(cfg.seed, {rng_stream::split}));
  shuffler.shuffle(order);
  const auto n_val = static_cast<std::size_t>(std::floor(cfg.ratios[1] * n));
  const auto n_test = static_cast<std::size_t>(std::floor(cfg.ratios[2] * n));
  const std::size_t n_train = n - n_val - n_test;
  for (std::size_t i = 0; i < n_train + n_val; ++i) {
    const std::size_t row = order[i];
    ds.times[row] = 12345.0 + static_cast<double>(i);
    ds.status[row] = 1;
    for (auto& col : ds.columns) {
      if (col.kind == ColumnKind::continuous) col.numeric[row] = -9999.0;
      else col.codes[row] = 0;
    }
  }
  save_dataset(ds, dir.file("data.csv"));
  cmd_evaluate(cfg, RunContext{dir.file("eval2"), 1});

  CHECK(read_file(dir.file("eval1/metrics.json")) == read_file(dir.file("eval2/metrics.json")));
  CHECK(read_file(dir.file("eval1/strata.csv")) == read_file(dir.file("eval2/strata.csv")));
}

TEST_CASE("cmd_score applies a card to a patients file") {
  TempDir dir;
  const std::string card_path = std::string(SURVSCORE_TEST_ASSETS) + "/table2_scorecard.csv";
  write_file(dir.file("patients.csv"),
             "age,bun,resp_rate,creatinine,anion_gap,lactate,temperature,extra\n"
             "80,15,24,1.0,12,2.0,37.0,ignored\n"
             "20,5,13,1.0,10,0.5,37.0,ignored\n"
             "90,7.5,30,0.4,25,5,35,ignored\n");
  cmd_score(card_path, dir.file("patients.csv"), dir.file("scores.csv"));
  auto table = read_csv(dir.file("scores.csv"));
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0][1] == "44");
  CHECK(table.rows[1][1] == "0");
  CHECK(table.rows[2][1] == "100");

  write_file(dir.file("bad.csv"), "age,bun\n80,15\n");
  CHECK_THROWS_AS(cmd_score(card_path, dir.file("bad.csv"), dir.file("x.csv")), ValidationError);
}

TEST_CASE("CLI exit codes: 0 ok, 1 validation, 3 io") {
  TempDir dir;
  make_data(dir.file("data.csv"), 46);
  write_file(dir.file("cfg.json"), pipeline_config(dir.file("data.csv"), 11));
  CHECK(run_cli("rank --config " + dir.file("cfg.json") + " --out-dir " + dir.file("out")) == 0);
  CHECK(run_cli("derive --config " + dir.file("cfg.json") + " --out-dir " + dir.file("out") +
                " --ranking " + dir.file("out/ranking.csv")) == 0);
  CHECK(run_cli("score --card " + dir.file("out/scorecard.json") + " --patients " +
                dir.file("nonexistent.csv") + " --out " + dir.file("s.csv")) == 3);
  write_file(dir.file("bad.json"), "{\"data\": {\"path\": \"\"}, \"unknown_key\": 1}");
  CHECK(run_cli("derive --config " + dir.file("bad.json")) == 1);
  CHECK(run_cli("evaluate --config " + dir.file("cfg.json")) == 1); // card missing
}

TEST_CASE("config parsing validates its invariants") {
  TempDir dir;
  write_file(dir.file("bad1.json"),
             "{\"evaluation\": {\"times\": [5, 95], \"horizon\": 90}}");
  CHECK_THROWS_WITH_AS(load_config(dir.file("bad1.json")), doctest::Contains("horizon"),
                       ValidationError);
  write_file(dir.file("bad2.json"), "{\"evaluation\": {\"strata\": [30, 20]}}");
  CHECK_THROWS_AS(load_config(dir.file("bad2.json")), ValidationError);
  write_file(dir.file("bad3.json"), "{\"split\": {\"ratios\": [1, 0]}}");
  CHECK_THROWS_AS(load_config(dir.file("bad3.json")), ValidationError);
  write_file(dir.file("bad4.json"), "not json");
  CHECK_THROWS_AS(load_config(dir.file("bad4.json")), ValidationError);
  CHECK_THROWS_AS(load_config(dir.file("missing.json")), IoError);
}
