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

// cotrain: ingest, synthesize, train, evaluate, ablate and sweep.
//
// Exit codes: 0 ok, 2 configuration error, 3 data error, 4 numeric abort.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cotrain/dataset.h"
#include "cotrain/errors.h"
#include "cotrain/evaluation.h"
#include "cotrain/experiment.h"
#include "cotrain/models.h"

namespace {

using namespace cotrain;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  bool emit_plots = false;

  void Register(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "key=value config file");
    cmd->add_option("--set", overrides, "override a config key (key=value)");
    cmd->add_option("-o,--output-dir", output_dir, "output directory");
    cmd->add_flag("--emit-plots", emit_plots, "write SVG charts");
  }

  ExperimentSpec Resolve() const {
    ConfigMap config;
    if (!config_path.empty()) config = LoadConfig(config_path);
    for (const auto& o : overrides) ApplyOverride(config, o);
    if (!output_dir.empty()) config["run.output_dir"] = output_dir;
    if (emit_plots) config["run.emit_plots"] = "true";
    return SpecFromConfig(config);
  }
};

void PrintDatasetStats(const InteractionDataset& ds) {
  std::cout << "users=" << ds.num_users() << " items=" << ds.num_items()
            << " interactions=" << ds.num_interactions() << "\n";
}

std::vector<std::size_t> ParseValues(const std::string& text) {
  std::vector<std::size_t> values;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      values.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ConfigError("bad sweep value '" + part + "'");
    }
  }
  return values;
}

int Run(int argc, char** argv) {
  CLI::App app{"Cooperative retriever/ranker training"};
  app.require_subcommand(1);

  std::string ingest_in, ingest_out;
  std::size_t ingest_min = 5, ingest_len = kDefaultMaxSeqLen;
  auto* ingest = app.add_subcommand("ingest", "filter and reindex a TSV log");
  ingest->add_option("-i,--input", ingest_in, "user<TAB>item<TAB>timestamp")
      ->required();
  ingest->add_option("-o,--output", ingest_out, "cleaned log")->required();
  ingest->add_option("--min-interactions", ingest_min);
  ingest->add_option("--max-seq-len", ingest_len);

  ConfigArgs synth_args;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic log");
  synth_args.Register(synth);
  synth->add_option("--data-out", synth_out, "destination TSV")->required();

  ConfigArgs train_args;
  auto* train = app.add_subcommand("train", "run an experiment");
  train_args.Register(train);

  ConfigArgs eval_args;
  std::string retriever_path, ranker_path;
  int eval_epoch = 0;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate checkpoints");
  eval_args.Register(evaluate);
  evaluate->add_option("--retriever", retriever_path)->required();
  evaluate->add_option("--ranker", ranker_path)->required();
  evaluate->add_option("--epoch", eval_epoch, "epoch tag for the report");

  ConfigArgs ablate_args;
  std::string table = "table3";
  auto* ablate = app.add_subcommand("ablate", "strategy ablation table");
  ablate_args.Register(ablate);
  ablate->add_option("--table", table)
      ->check(CLI::IsMember({"table3", "table4"}));

  ConfigArgs sweep_args;
  std::string knob = "pool_size", values_text = "50,100,150,200,250,300";
  auto* sweep = app.add_subcommand("sweep", "grid over one knob");
  sweep_args.Register(sweep);
  sweep->add_option("--knob", knob)->check(CLI::IsMember({"pool_size"}));
  sweep->add_option("--values", values_text, "comma-separated values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (ingest->parsed()) {
    const auto ds = Ingest(ingest_in, ingest_min, ingest_len);
    std::ofstream out(ingest_out, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + ingest_out);
    WriteInteractions(ds, out);
    PrintDatasetStats(ds);
  } else if (synth->parsed()) {
    const ExperimentSpec spec = synth_args.Resolve();
    const auto ds = LoadData(spec.data);
    std::ofstream out(synth_out, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + synth_out);
    WriteInteractions(ds, out);
    PrintDatasetStats(ds);
  } else if (train->parsed()) {
    const ExperimentSpec spec = train_args.Resolve();
    spec.Validate();
    const auto ds = LoadData(spec.data);
    PrintDatasetStats(ds);
    if (spec.mode == RunMode::kAblationTable3 ||
        spec.mode == RunMode::kAblationTable4) {
      const std::string header = spec.mode == RunMode::kAblationTable3
                                     ? "ranker_negative_strategy"
                                     : "kl_item_strategy";
      std::cout << FormatComparison(header, RunAblation(spec, ds));
    } else {
      std::cout << FormatSummary(RunExperiment(spec, ds).summary);
    }
  } else if (evaluate->parsed()) {
    const ExperimentSpec spec = eval_args.Resolve();
    const auto ds = LoadData(spec.data);
    const auto retriever = LoadCheckpoint(std::filesystem::path(retriever_path));
    const auto ranker = LoadCheckpoint(std::filesystem::path(ranker_path));
    if (retriever.kind() != ModelKind::kRetriever ||
        ranker.kind() != ModelKind::kRanker) {
      throw DataError("checkpoint kinds do not match --retriever/--ranker");
    }
    if (retriever.num_items() != ds.num_items() ||
        ranker.num_items() != ds.num_items()) {
      throw DataError("checkpoint catalog size differs from the dataset");
    }
    const auto result =
        Evaluate(ds, retriever, ranker, spec.train.eval, eval_epoch);
    for (const auto& r : result.reports) std::cout << ToJsonLine(r) << "\n";
  } else if (ablate->parsed()) {
    ExperimentSpec spec = ablate_args.Resolve();
    spec.mode = table == "table3" ? RunMode::kAblationTable3
                                  : RunMode::kAblationTable4;
    spec.Validate();
    const auto ds = LoadData(spec.data);
    const std::string header =
        table == "table3" ? "ranker_negative_strategy" : "kl_item_strategy";
    std::cout << FormatComparison(header, RunAblation(spec, ds));
  } else if (sweep->parsed()) {
    const ExperimentSpec spec = sweep_args.Resolve();
    spec.Validate();
    const auto ds = LoadData(spec.data);
    std::cout << FormatComparison(
        knob, RunPoolSizeSweep(spec, ds, ParseValues(values_text)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const cotrain::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cotrain::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const cotrain::NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return kExitNumeric;
  }
}
