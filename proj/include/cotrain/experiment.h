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

// Experiment plumbing behind the command-line tool.
//
// A run is described by a flat key=value config (see README for the keys).
// Artifacts under the output directory:
//   config.txt                    resolved configuration
//   seed-<s>/retriever.ckpt       final checkpoints
//   seed-<s>/ranker.ckpt
//   seed-<s>/metrics.jsonl        one line per (epoch, mode), epoch 0 = init;
//                                 only 0 and the last with eval.each_epoch=false
//   seed-<s>/losses.jsonl         epoch-mean training losses
//   summary.tsv                   final-epoch mean and std over seeds

#ifndef COTRAIN_EXPERIMENT_H_
#define COTRAIN_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cotrain/dataset.h"
#include "cotrain/evaluation.h"
#include "cotrain/trainer.h"

namespace cotrain {

inline constexpr char kOutputDirEnv[] = "COTRAIN_OUTPUT_DIR";

enum class RunMode {
  kCorr,            // cooperative training
  kTwoStage,        // both models trained independently
  kAblationTable3,  // every ranker negative strategy
  kAblationTable4,  // every KL item strategy
};

const char* RunModeName(RunMode mode);

struct DataSource {
  bool synthetic = true;
  std::filesystem::path path;
  std::size_t min_interactions = 5;
  std::size_t max_seq_len = kDefaultMaxSeqLen;
  SyntheticConfig synth;
};

struct ExperimentSpec {
  DataSource data;
  TrainConfig train;
  RunMode mode = RunMode::kCorr;
  std::vector<std::uint64_t> seeds = {1};
  std::filesystem::path output_dir;
  bool emit_plots = false;

  void Validate() const;
};

// Ordered so that dumps are diff-able.
using ConfigMap = std::map<std::string, std::string>;

// `key = value` lines; '#' starts a comment line. Throws ConfigError.
ConfigMap ParseConfig(std::istream& in);
ConfigMap LoadConfig(const std::filesystem::path& path);
// "key=value" from --set.
void ApplyOverride(ConfigMap& config, const std::string& assignment);

// Unknown keys and malformed values throw ConfigError. An unset output
// directory falls back to $COTRAIN_OUTPUT_DIR, then "cotrain-out".
ExperimentSpec SpecFromConfig(const ConfigMap& config);
// Every key with its effective value.
ConfigMap ConfigFromSpec(const ExperimentSpec& spec);
std::string DumpConfig(const ConfigMap& config);

InteractionDataset LoadData(const DataSource& source);

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::vector<MetricsReport> reports;  // epoch 0 first
  std::vector<EpochLosses> losses;
};

struct SummaryRow {
  EvalMode mode = EvalMode::kTwoStage;
  std::string metric;  // ndcg | recall | mrr
  double mean = 0.0;
  double std = 0.0;  // sample std; 0 for a single seed
  std::vector<double> values;  // per seed, final epoch
};

struct ExperimentOutcome {
  std::vector<SeedOutcome> seeds;
  std::vector<SummaryRow> summary;
};

// Final-epoch reports of each seed folded into mean/std rows.
std::vector<SummaryRow> Summarize(const std::vector<SeedOutcome>& seeds);
std::string FormatSummary(const std::vector<SummaryRow>& rows);

// kCorr or kTwoStage; writes the artifacts listed above.
ExperimentOutcome RunExperiment(const ExperimentSpec& spec,
                                const InteractionDataset& dataset);

struct ComparisonRow {
  std::string label;
  std::vector<SummaryRow> summary;
};

// One full run per strategy, each in output_dir/<strategy>; the table goes
// to output_dir/<mode name>.tsv.
std::vector<ComparisonRow> RunAblation(const ExperimentSpec& spec,
                                       const InteractionDataset& dataset);

// One full run per pool size, in output_dir/pool_size-<v>; the table goes to
// output_dir/sweep-pool_size.tsv.
std::vector<ComparisonRow> RunPoolSizeSweep(
    const ExperimentSpec& spec, const InteractionDataset& dataset,
    const std::vector<std::size_t>& values);

std::string FormatComparison(const std::string& label_header,
                             const std::vector<ComparisonRow>& rows);

// Per-epoch metric file round trip.
void WriteMetrics(const std::filesystem::path& path,
                  const std::vector<MetricsReport>& reports);
std::vector<MetricsReport> ReadMetrics(const std::filesystem::path& path);

}  // namespace cotrain

#endif  // COTRAIN_EXPERIMENT_H_
