// Copyright 2026 The Cotrain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cotrain/experiment.h"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <iterator>
#include <string>

#include "cotrain/errors.h"
#include "cotrain/strategies.h"

namespace cotrain {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cotrain-exp-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfigMap TinyConfigMap(const fs::path& out) {
  return ConfigMap{
      {"synth.num_users", "150"},     {"synth.num_items", "60"},
      {"synth.min_length", "6"},      {"synth.max_length", "10"},
      {"synth.seed", "3"},            {"model.dim", "6"},
      {"model.hidden", "8"},          {"trainer.epochs", "2"},
      {"trainer.batch_size", "32"},   {"trainer.learning_rate", "0.5"},
      {"sampler.pool_size", "30"},    {"sampler.num_samples", "8"},
      {"strategy.global_top", "20"},  {"strategy.local_pool", "15"},
      {"strategy.top_count", "4"},    {"strategy.rand_count", "4"},
      {"strategy.selected", "8"},     {"eval.retrieve_k", "30"},
      {"eval.k", "10"},               {"run.output_dir", out.string()},
  };
}

ExperimentSpec TinySpec(const fs::path& out) {
  return SpecFromConfig(TinyConfigMap(out));
}

TEST(ConfigTest, ParseReportsLineNumber) {
  std::istringstream in("# comment\nmodel.dim = 4\n\nnot a pair\n");
  try {
    ParseConfig(in);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(ConfigTest, ParseTrimsAndSkipsComments) {
  std::istringstream in("# c\n  model.dim =  4 \ntrainer.epochs=3\n");
  const auto c = ParseConfig(in);
  EXPECT_EQ(c.at("model.dim"), "4");
  EXPECT_EQ(c.at("trainer.epochs"), "3");
  EXPECT_EQ(c.size(), 2u);
}

TEST(ConfigTest, UnknownKeyAndBadValuesRejected) {
  EXPECT_THROW(SpecFromConfig({{"model.dimm", "4"}}), ConfigError);
  EXPECT_THROW(SpecFromConfig({{"model.dim", "four"}}), ConfigError);
  EXPECT_THROW(SpecFromConfig({{"trainer.learning_rate", "nan"}}),
               ConfigError);
  EXPECT_THROW(SpecFromConfig({{"run.mode", "joint"}}), ConfigError);
  EXPECT_THROW(SpecFromConfig({{"eval.each_epoch", "yes"}}), ConfigError);
  ConfigMap c;
  EXPECT_THROW(ApplyOverride(c, "no-equals"), ConfigError);
  EXPECT_THROW(ApplyOverride(c, "=3"), ConfigError);
}

TEST(ConfigTest, DumpRoundTrips) {
  auto spec = TinySpec("/tmp/x");
  spec.seeds = {4, 9};
  spec.mode = RunMode::kTwoStage;
  const std::string dump = DumpConfig(ConfigFromSpec(spec));
  std::istringstream in(dump);
  const auto again = SpecFromConfig(ParseConfig(in));
  EXPECT_EQ(DumpConfig(ConfigFromSpec(again)), dump);
  EXPECT_EQ(again.seeds, spec.seeds);
  EXPECT_EQ(again.mode, RunMode::kTwoStage);
}

TEST(ConfigTest, OutputDirFallsBackToEnvironment) {
  ::setenv(kOutputDirEnv, "/tmp/from-env", 1);
  EXPECT_EQ(SpecFromConfig({}).output_dir, fs::path("/tmp/from-env"));
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(SpecFromConfig({}).output_dir, fs::path("cotrain-out"));
}

TEST(ExperimentTest, ZeroEpochsReportsInitialModel) {
  const auto dir = TempDir("zero");
  auto spec = TinySpec(dir);
  spec.train.epochs = 0;
  const auto ds = LoadData(spec.data);
  const auto outcome = RunExperiment(spec, ds);
  ASSERT_EQ(outcome.seeds.size(), 1u);
  EXPECT_EQ(outcome.seeds[0].reports.size(), 3u);
  for (const auto& r : outcome.seeds[0].reports) EXPECT_EQ(r.epoch, 0);
  EXPECT_EQ(outcome.summary.size(), 9u);
  EXPECT_TRUE(fs::exists(dir / "summary.tsv"));
  EXPECT_TRUE(fs::exists(dir / "seed-1" / "retriever.ckpt"));
}

TEST(ExperimentTest, RunsAreByteIdentical) {
  const auto a = TempDir("det-a"), b = TempDir("det-b");
  const auto ds = LoadData(TinySpec(a).data);
  RunExperiment(TinySpec(a), ds);
  RunExperiment(TinySpec(b), ds);
  for (const char* f : {"seed-1/metrics.jsonl", "seed-1/losses.jsonl",
                        "seed-1/retriever.ckpt", "seed-1/ranker.ckpt",
                        "summary.tsv"}) {
    EXPECT_EQ(ReadFile(a / f), ReadFile(b / f)) << f;
    EXPECT_FALSE(ReadFile(a / f).empty()) << f;
  }
}

TEST(ExperimentTest, SummaryRecomputableFromMetricsFiles) {
  const auto dir = TempDir("summary");
  auto spec = TinySpec(dir);
  spec.seeds = {1, 2, 3};
  const auto ds = LoadData(spec.data);
  const auto outcome = RunExperiment(spec, ds);
  std::vector<SeedOutcome> reread;
  for (std::uint64_t s : spec.seeds) {
    SeedOutcome o;
    o.seed = s;
    o.reports =
        ReadMetrics(dir / ("seed-" + std::to_string(s)) / "metrics.jsonl");
    EXPECT_EQ(o.reports.size(), 3u * (spec.train.epochs + 1));
    reread.push_back(std::move(o));
  }
  const auto rows = Summarize(reread);
  ASSERT_EQ(rows.size(), outcome.summary.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].values.size(), 3u);
    double mean = 0.0;
    for (double v : rows[i].values) mean += v / 3.0;
    EXPECT_NEAR(rows[i].mean, mean, 1e-12);
    EXPECT_NEAR(rows[i].mean, outcome.summary[i].mean, 1e-12);
    double ss = 0.0;
    for (double v : rows[i].values) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(rows[i].std, std::sqrt(ss / 2.0), 1e-12);
  }
  EXPECT_EQ(ReadFile(dir / "summary.tsv"), FormatSummary(rows));
}

TEST(ExperimentTest, FinalEpochEvaluatedWithoutPerEpochEvaluation) {
  const auto dir = TempDir("noeach");
  auto spec = TinySpec(dir);
  spec.train.evaluate_each_epoch = false;
  const auto ds = LoadData(spec.data);
  const auto outcome = RunExperiment(spec, ds);
  const auto& reports = outcome.seeds[0].reports;
  ASSERT_EQ(reports.size(), 6u);
  EXPECT_EQ(reports.back().epoch, spec.train.epochs);
}

TEST(ExperimentTest, AblationTablesComplete) {
  for (RunMode mode : {RunMode::kAblationTable3, RunMode::kAblationTable4}) {
    const auto dir = TempDir(RunModeName(mode));
    auto spec = TinySpec(dir);
    spec.mode = mode;
    spec.train.epochs = 1;
    const auto ds = LoadData(spec.data);
    const auto rows = RunAblation(spec, ds);
    const std::size_t expected = mode == RunMode::kAblationTable3
                                     ? std::size(kAllNegativeStrategies)
                                     : std::size(kAllKlItemStrategies);
    ASSERT_EQ(rows.size(), expected);
    for (const auto& row : rows) {
      ASSERT_EQ(row.summary.size(), 9u);
      for (const auto& s : row.summary) EXPECT_TRUE(std::isfinite(s.mean));
    }
    const std::string table =
        ReadFile(dir / (std::string(RunModeName(mode)) + ".tsv"));
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'),
              static_cast<long>(1 + 3 * expected));
  }
}

TEST(ExperimentTest, SweepRowsMatchStandaloneRuns) {
  const auto dir = TempDir("sweep");
  auto spec = TinySpec(dir);
  spec.train.epochs = 1;
  const auto ds = LoadData(spec.data);
  const auto rows = RunPoolSizeSweep(spec, ds, {10, 40});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].label, "10");
  auto alone = spec;
  alone.train.pool_size = 40;
  alone.output_dir = TempDir("sweep-alone");
  const auto outcome = RunExperiment(alone, ds);
  for (std::size_t i = 0; i < outcome.summary.size(); ++i) {
    EXPECT_EQ(rows[1].summary[i].mean, outcome.summary[i].mean);
  }
  EXPECT_TRUE(fs::exists(dir / "sweep-pool_size.tsv"));
  EXPECT_THROW(RunPoolSizeSweep(spec, ds, {}), ConfigError);
  EXPECT_THROW(RunPoolSizeSweep(spec, ds, {4}), ConfigError);
}

TEST(ExperimentTest, MetricsFileRoundTrip) {
  std::vector<MetricsReport> reports = {
      {0, EvalMode::kRetrieverOnly, 20, 0.125, 0.25, 0.0625, 7},
      {3, EvalMode::kTwoStage, 10, 1.0 / 3.0, 0.5, 0.2, 11}};
  const auto path = TempDir("metrics") += ".jsonl";
  WriteMetrics(path, reports);
  const auto back = ReadMetrics(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].epoch, 3);
  EXPECT_EQ(back[1].mode, EvalMode::kTwoStage);
  EXPECT_EQ(back[1].ndcg, 1.0 / 3.0);
  EXPECT_EQ(back[0].num_cases, 7u);
}

int RunCli(const std::string& args) {
  const std::string cmd =
      std::string(COTRAIN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  const auto dir = TempDir("cli");
  fs::create_directories(dir);
  EXPECT_EQ(RunCli("train --set bogus.key=1 -o " + dir.string()), 2);
  EXPECT_EQ(RunCli("train --set trainer.learning_rate=0 -o " + dir.string()),
            2);
  EXPECT_EQ(RunCli("ingest -i " + (dir / "missing.tsv").string() + " -o " +
                   (dir / "out.tsv").string()),
            3);
  {
    std::ofstream bad(dir / "bad.tsv");
    bad << "u1\ti1\t1\nu1\ti2\n";
  }
  EXPECT_EQ(RunCli("ingest -i " + (dir / "bad.tsv").string() + " -o " +
                   (dir / "out.tsv").string()),
            3);
  EXPECT_EQ(RunCli("train --set data.source=file --set data.path=" +
                   (dir / "missing.tsv").string() + " -o " + dir.string()),
            3);
  std::string zero;
  for (const auto& [k, v] : TinyConfigMap(dir / "run")) {
    if (k != "run.output_dir") zero += " --set " + k + "=" + v;
  }
  EXPECT_EQ(RunCli("train" + zero + " --set trainer.epochs=0 -o " +
                   (dir / "run").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "run" / "summary.tsv"));
}

}  // namespace
}  // namespace cotrain
