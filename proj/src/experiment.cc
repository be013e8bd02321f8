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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "cotrain/errors.h"
#include "cotrain/plot.h"
#include "json.hpp"

namespace cotrain {

const char* RunModeName(RunMode mode) {
  switch (mode) {
    case RunMode::kCorr:
      return "corr";
    case RunMode::kTwoStage:
      return "two_stage";
    case RunMode::kAblationTable3:
      return "ablation-table3";
    case RunMode::kAblationTable4:
      return "ablation-table4";
  }
  return "unknown";
}

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseInteger(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

double ParseReal(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a finite number, got '" + value + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::uint64_t> ParseSeeds(const std::string& key,
                                      const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(value);
  std::string part;
  while (std::getline(in, part, ',')) {
    seeds.push_back(ParseInteger<std::uint64_t>(key, Trim(part)));
  }
  return seeds;
}

std::string Real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Bool(bool b) { return b ? "true" : "false"; }

struct Key {
  const char* name;
  std::function<void(ExperimentSpec&, const std::string&)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

#define COTRAIN_INT_KEY(NAME, FIELD, TYPE)                                \
  Key {                                                                   \
    NAME,                                                                 \
        [](ExperimentSpec& s, const std::string& v) {                     \
          s.FIELD = ParseInteger<TYPE>(NAME, v);                          \
        },                                                                \
        [](const ExperimentSpec& s) { return std::to_string(s.FIELD); } \
  }
#define COTRAIN_REAL_KEY(NAME, FIELD)                                          \
  Key {                                                                        \
    NAME,                                                                      \
        [](ExperimentSpec& s, const std::string& v) {                          \
          s.FIELD = ParseReal(NAME, v);                                        \
        },                                                                     \
        [](const ExperimentSpec& s) { return Real(s.FIELD); }                  \
  }
#define COTRAIN_BOOL_KEY(NAME, FIELD)                                          \
  Key {                                                                        \
    NAME,                                                                      \
        [](ExperimentSpec& s, const std::string& v) {                          \
          s.FIELD = ParseBool(NAME, v);                                        \
        },                                                                     \
        [](const ExperimentSpec& s) { return Bool(s.FIELD); }                  \
  }

const std::vector<Key>& Keys() {
  static const std::vector<Key> keys = {
      {"data.source",
       [](ExperimentSpec& s, const std::string& v) {
         if (v == "synthetic") {
           s.data.synthetic = true;
         } else if (v == "file") {
           s.data.synthetic = false;
         } else {
           throw ConfigError("data.source: expected synthetic or file");
         }
       },
       [](const ExperimentSpec& s) -> std::string {
         return s.data.synthetic ? "synthetic" : "file";
       }},
      {"data.path",
       [](ExperimentSpec& s, const std::string& v) { s.data.path = v; },
       [](const ExperimentSpec& s) { return s.data.path.string(); }},
      COTRAIN_INT_KEY("data.min_interactions", data.min_interactions,
                      std::size_t),
      COTRAIN_INT_KEY("data.max_seq_len", data.max_seq_len, std::size_t),
      COTRAIN_INT_KEY("synth.num_users", data.synth.num_users, std::int32_t),
      COTRAIN_INT_KEY("synth.num_items", data.synth.num_items, std::int32_t),
      COTRAIN_INT_KEY("synth.latent_dim", data.synth.latent_dim, std::int32_t),
      COTRAIN_INT_KEY("synth.min_length", data.synth.min_length, std::int32_t),
      COTRAIN_INT_KEY("synth.max_length", data.synth.max_length, std::int32_t),
      COTRAIN_REAL_KEY("synth.sharpness", data.synth.sharpness),
      COTRAIN_REAL_KEY("synth.recency_weight", data.synth.recency_weight),
      COTRAIN_REAL_KEY("synth.item_bias_std", data.synth.item_bias_std),
      COTRAIN_INT_KEY("synth.seed", data.synth.seed, std::uint64_t),
      COTRAIN_INT_KEY("model.dim", train.dim, std::int32_t),
      COTRAIN_INT_KEY("model.hidden", train.hidden, std::int32_t),
      COTRAIN_INT_KEY("trainer.epochs", train.epochs, int),
      COTRAIN_INT_KEY("trainer.batch_size", train.batch_size, std::size_t),
      COTRAIN_REAL_KEY("trainer.learning_rate", train.learning_rate),
      COTRAIN_REAL_KEY("trainer.weight_decay", train.weight_decay),
      COTRAIN_REAL_KEY("trainer.kl_weight", train.kl_weight),
      {"trainer.ranker_negative_strategy",
       [](ExperimentSpec& s, const std::string& v) {
         s.train.ranker_negative_strategy = ParseNegativeStrategy(v);
       },
       [](const ExperimentSpec& s) -> std::string {
         return NegativeStrategyName(s.train.ranker_negative_strategy);
       }},
      {"trainer.kl_item_strategy",
       [](ExperimentSpec& s, const std::string& v) {
         s.train.kl_item_strategy = ParseKlItemStrategy(v);
       },
       [](const ExperimentSpec& s) -> std::string {
         return KlItemStrategyName(s.train.kl_item_strategy);
       }},
      COTRAIN_BOOL_KEY("trainer.update_retriever", train.update_retriever),
      COTRAIN_BOOL_KEY("trainer.update_ranker", train.update_ranker),
      COTRAIN_BOOL_KEY("trainer.ranker_loss", train.ranker_loss_enabled),
      COTRAIN_INT_KEY("strategy.global_top", train.strategy.global_top,
                      std::size_t),
      COTRAIN_INT_KEY("strategy.local_pool", train.strategy.local_pool,
                      std::size_t),
      COTRAIN_INT_KEY("strategy.top_count", train.strategy.top_count,
                      std::size_t),
      COTRAIN_INT_KEY("strategy.rand_count", train.strategy.rand_count,
                      std::size_t),
      COTRAIN_INT_KEY("strategy.selected", train.strategy.selected,
                      std::size_t),
      {"sampler.mode",
       [](ExperimentSpec& s, const std::string& v) {
         if (v == "two_step") {
           s.train.sampler_mode = SamplerMode::kTwoStep;
         } else if (v == "static") {
           s.train.sampler_mode = SamplerMode::kStatic;
         } else {
           throw ConfigError("sampler.mode: expected two_step or static");
         }
       },
       [](const ExperimentSpec& s) -> std::string {
         return s.train.sampler_mode == SamplerMode::kTwoStep ? "two_step"
                                                              : "static";
       }},
      COTRAIN_INT_KEY("sampler.pool_size", train.pool_size, std::size_t),
      COTRAIN_INT_KEY("sampler.num_samples", train.num_samples, std::size_t),
      COTRAIN_REAL_KEY("sampler.temperature", train.temperature),
      {"sampler.proposal",
       [](ExperimentSpec& s, const std::string& v) {
         s.train.proposal = ParseProposalKind(v);
       },
       [](const ExperimentSpec& s) -> std::string {
         return ProposalKindName(s.train.proposal);
       }},
      COTRAIN_REAL_KEY("sampler.popularity_exponent",
                       train.popularity_exponent),
      COTRAIN_INT_KEY("eval.k", train.eval.k, int),
      COTRAIN_INT_KEY("eval.retrieve_k", train.eval.retrieve_k, std::size_t),
      COTRAIN_BOOL_KEY("eval.exclude_interacted", train.eval.exclude_interacted),
      COTRAIN_INT_KEY("eval.workers", train.eval.workers, int),
      COTRAIN_BOOL_KEY("eval.each_epoch", train.evaluate_each_epoch),
      {"run.mode",
       [](ExperimentSpec& s, const std::string& v) {
         for (RunMode m : {RunMode::kCorr, RunMode::kTwoStage,
                           RunMode::kAblationTable3, RunMode::kAblationTable4}) {
           if (v == RunModeName(m)) {
             s.mode = m;
             return;
           }
         }
         throw ConfigError("run.mode: unknown mode '" + v + "'");
       },
       [](const ExperimentSpec& s) -> std::string {
         return RunModeName(s.mode);
       }},
      {"run.seeds",
       [](ExperimentSpec& s, const std::string& v) {
         s.seeds = ParseSeeds("run.seeds", v);
       },
       [](const ExperimentSpec& s) {
         std::string out;
         for (std::size_t i = 0; i < s.seeds.size(); ++i) {
           out += (i ? "," : "") + std::to_string(s.seeds[i]);
         }
         return out;
       }},
      {"run.output_dir",
       [](ExperimentSpec& s, const std::string& v) { s.output_dir = v; },
       [](const ExperimentSpec& s) { return s.output_dir.string(); }},
      COTRAIN_BOOL_KEY("run.emit_plots", emit_plots),
  };
  return keys;
}

#undef COTRAIN_INT_KEY
#undef COTRAIN_REAL_KEY
#undef COTRAIN_BOOL_KEY

}  // namespace

void ExperimentSpec::Validate() const {
  if (seeds.empty()) throw ConfigError("run.seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() !=
      seeds.size()) {
    throw ConfigError("run.seeds contains duplicates");
  }
  if (!data.synthetic && data.path.empty()) {
    throw ConfigError("data.path is required when data.source=file");
  }
  if (data.min_interactions < 1) {
    throw ConfigError("data.min_interactions must be >= 1");
  }
  if (data.max_seq_len < 1) throw ConfigError("data.max_seq_len must be >= 1");
  if (output_dir.empty()) throw ConfigError("output directory is empty");
  train.Validate();
}

ConfigMap ParseConfig(std::istream& in) {
  ConfigMap config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) +
                        ": expected key=value");
    }
    const std::string key = Trim(t.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(number) +
                        ": empty key");
    }
    config[key] = Trim(t.substr(eq + 1));
  }
  return config;
}

ConfigMap LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return ParseConfig(in);
}

void ApplyOverride(ConfigMap& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || Trim(assignment.substr(0, eq)).empty()) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  config[Trim(assignment.substr(0, eq))] = Trim(assignment.substr(eq + 1));
}

ExperimentSpec SpecFromConfig(const ConfigMap& config) {
  ExperimentSpec spec;
  for (const auto& [key, value] : config) {
    const auto& keys = Keys();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) {
      return key == k.name;
    });
    if (it == keys.end()) throw ConfigError("unknown config key '" + key + "'");
    it->set(spec, value);
  }
  if (spec.output_dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    spec.output_dir = (env != nullptr && *env != '\0') ? env : "cotrain-out";
  }
  return spec;
}

ConfigMap ConfigFromSpec(const ExperimentSpec& spec) {
  ConfigMap out;
  for (const Key& k : Keys()) out[k.name] = k.get(spec);
  return out;
}

std::string DumpConfig(const ConfigMap& config) {
  std::string out;
  for (const auto& [k, v] : config) out += k + "=" + v + "\n";
  return out;
}

InteractionDataset LoadData(const DataSource& source) {
  if (source.synthetic) {
    return Synthesize(source.synth, source.min_interactions,
                      source.max_seq_len);
  }
  return Ingest(source.path, source.min_interactions, source.max_seq_len);
}

void WriteMetrics(const std::filesystem::path& path,
                  const std::vector<MetricsReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& r : reports) out << ToJsonLine(r) << '\n';
}

std::vector<MetricsReport> ReadMetrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<MetricsReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(FromJsonLine(line));
  }
  return out;
}

namespace {

constexpr const char* kMetricNames[] = {"ndcg", "recall", "mrr"};

double MetricOf(const MetricsReport& r, const std::string& metric) {
  if (metric == "ndcg") return r.ndcg;
  if (metric == "recall") return r.recall;
  return r.mrr;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void PrepareDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string());
  }
  const auto probe = dir / ".write-test";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output directory not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

void WriteLosses(const std::filesystem::path& path,
                 const std::vector<EpochLosses>& losses) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& l : losses) {
    nlohmann::ordered_json j;
    j["epoch"] = l.epoch;
    j["retriever_loss"] = l.retriever_loss;
    j["kl"] = l.kl;
    j["ranker_loss"] = l.ranker_loss;
    j["num_pairs"] = l.num_pairs;
    out << j.dump() << '\n';
  }
}

// Seed-mean of a metric per epoch, one series per mode.
LineChart EpochChart(const std::vector<SeedOutcome>& seeds,
                     const std::string& metric) {
  LineChart chart{metric + " vs epoch", "epoch", metric, {}};
  for (EvalMode mode : kAllEvalModes) {
    std::map<int, std::pair<double, int>> acc;
    for (const auto& s : seeds) {
      for (const auto& r : s.reports) {
        if (r.mode != mode) continue;
        acc[r.epoch].first += MetricOf(r, metric);
        acc[r.epoch].second += 1;
      }
    }
    Series series{EvalModeName(mode), {}, {}};
    for (const auto& [epoch, sum] : acc) {
      series.x.push_back(epoch);
      series.y.push_back(sum.first / sum.second);
    }
    chart.series.push_back(std::move(series));
  }
  return chart;
}

}  // namespace

std::vector<SummaryRow> Summarize(const std::vector<SeedOutcome>& seeds) {
  std::vector<SummaryRow> rows;
  for (EvalMode mode : kAllEvalModes) {
    for (const char* metric : kMetricNames) {
      SummaryRow row;
      row.mode = mode;
      row.metric = metric;
      for (const auto& s : seeds) {
        const MetricsReport* last = nullptr;
        for (const auto& r : s.reports) {
          if (r.mode == mode && (last == nullptr || r.epoch >= last->epoch)) {
            last = &r;
          }
        }
        if (last != nullptr) row.values.push_back(MetricOf(*last, metric));
      }
      const double n = static_cast<double>(row.values.size());
      if (n > 0) {
        for (double v : row.values) row.mean += v;
        row.mean /= n;
      }
      if (n > 1) {
        double ss = 0.0;
        for (double v : row.values) ss += (v - row.mean) * (v - row.mean);
        row.std = std::sqrt(ss / (n - 1));
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string FormatSummary(const std::vector<SummaryRow>& rows) {
  std::string out = "mode\tmetric\tmean\tstd\tper_seed\n";
  for (const auto& r : rows) {
    out += std::string(EvalModeName(r.mode)) + "\t" + r.metric + "\t" +
           Fixed(r.mean) + "\t" + Fixed(r.std) + "\t";
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      out += (i ? "," : "") + Fixed(r.values[i]);
    }
    out += "\n";
  }
  return out;
}

ExperimentOutcome RunExperiment(const ExperimentSpec& spec,
                                const InteractionDataset& dataset) {
  if (spec.mode != RunMode::kCorr && spec.mode != RunMode::kTwoStage) {
    throw ConfigError(std::string("RunExperiment cannot run mode ") +
                      RunModeName(spec.mode));
  }
  spec.Validate();
  PrepareDir(spec.output_dir);
  WriteText(spec.output_dir / "config.txt", DumpConfig(ConfigFromSpec(spec)));

  ExperimentOutcome outcome;
  for (std::uint64_t seed : spec.seeds) {
    TrainConfig config = spec.train;
    config.seed = seed;
    if (spec.mode == RunMode::kTwoStage) {
      config = IndependentConfig(config, IndependentTarget::kBoth);
    }
    const auto dir = spec.output_dir / ("seed-" + std::to_string(seed));
    PrepareDir(dir);

    TrainState state = InitState(config, dataset);
    SeedOutcome seed_outcome;
    seed_outcome.seed = seed;
    const auto initial =
        Evaluate(dataset, state.retriever, state.ranker, config.eval, 0);
    seed_outcome.reports.assign(initial.reports.begin(), initial.reports.end());

    TrainResult result = Resume(std::move(state), config, dataset);
    seed_outcome.reports.insert(seed_outcome.reports.end(),
                                result.reports.begin(), result.reports.end());
    if (!config.evaluate_each_epoch && config.epochs > 0) {
      const auto last = Evaluate(dataset, result.retriever, result.ranker,
                                 config.eval, config.epochs);
      seed_outcome.reports.insert(seed_outcome.reports.end(),
                                  last.reports.begin(), last.reports.end());
    }
    seed_outcome.losses = result.losses;

    SaveCheckpoint(result.retriever, dir / "retriever.ckpt");
    SaveCheckpoint(result.ranker, dir / "ranker.ckpt");
    WriteMetrics(dir / "metrics.jsonl", seed_outcome.reports);
    WriteLosses(dir / "losses.jsonl", seed_outcome.losses);
    outcome.seeds.push_back(std::move(seed_outcome));
  }
  outcome.summary = Summarize(outcome.seeds);
  WriteText(spec.output_dir / "summary.tsv", FormatSummary(outcome.summary));
  if (spec.emit_plots) {
    for (const char* metric : kMetricNames) {
      WriteSvg(EpochChart(outcome.seeds, metric),
               spec.output_dir / (std::string("plot-") + metric + "-epoch.svg"));
    }
  }
  return outcome;
}

std::string FormatComparison(const std::string& label_header,
                             const std::vector<ComparisonRow>& rows) {
  std::string out = label_header + "\tmode";
  for (const char* m : kMetricNames) {
    out += std::string("\t") + m + "\t" + m + "_std";
  }
  out += "\n";
  for (const auto& row : rows) {
    for (EvalMode mode : kAllEvalModes) {
      out += row.label + "\t" + EvalModeName(mode);
      for (const char* m : kMetricNames) {
        for (const auto& s : row.summary) {
          if (s.mode == mode && s.metric == m) {
            out += "\t" + Fixed(s.mean) + "\t" + Fixed(s.std);
          }
        }
      }
      out += "\n";
    }
  }
  return out;
}

std::vector<ComparisonRow> RunAblation(const ExperimentSpec& spec,
                                       const InteractionDataset& dataset) {
  std::vector<std::pair<std::string, ExperimentSpec>> runs;
  auto variant = [&](const std::string& label) {
    ExperimentSpec s = spec;
    s.mode = RunMode::kCorr;
    s.output_dir = spec.output_dir / label;
    return s;
  };
  std::string header;
  if (spec.mode == RunMode::kAblationTable3) {
    header = "ranker_negative_strategy";
    for (NegativeStrategy st : kAllNegativeStrategies) {
      ExperimentSpec s = variant(NegativeStrategyName(st));
      s.train.ranker_negative_strategy = st;
      runs.emplace_back(NegativeStrategyName(st), std::move(s));
    }
  } else if (spec.mode == RunMode::kAblationTable4) {
    header = "kl_item_strategy";
    for (KlItemStrategy st : kAllKlItemStrategies) {
      ExperimentSpec s = variant(KlItemStrategyName(st));
      s.train.kl_item_strategy = st;
      runs.emplace_back(KlItemStrategyName(st), std::move(s));
    }
  } else {
    throw ConfigError("run.mode must be ablation-table3 or ablation-table4");
  }
  spec.Validate();
  PrepareDir(spec.output_dir);

  std::vector<ComparisonRow> rows;
  for (auto& [label, s] : runs) {
    rows.push_back({label, RunExperiment(s, dataset).summary});
  }
  WriteText(spec.output_dir / (std::string(RunModeName(spec.mode)) + ".tsv"),
            FormatComparison(header, rows));
  return rows;
}

std::vector<ComparisonRow> RunPoolSizeSweep(
    const ExperimentSpec& spec, const InteractionDataset& dataset,
    const std::vector<std::size_t>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (spec.mode != RunMode::kCorr && spec.mode != RunMode::kTwoStage) {
    throw ConfigError("sweeps run in corr or two_stage mode");
  }
  std::vector<ExperimentSpec> runs;
  for (std::size_t v : values) {
    ExperimentSpec s = spec;
    s.train.pool_size = v;
    s.output_dir = spec.output_dir / ("pool_size-" + std::to_string(v));
    s.Validate();
    runs.push_back(std::move(s));
  }
  PrepareDir(spec.output_dir);

  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    rows.push_back(
        {std::to_string(values[i]), RunExperiment(runs[i], dataset).summary});
  }
  WriteText(spec.output_dir / "sweep-pool_size.tsv",
            FormatComparison("pool_size", rows));
  if (spec.emit_plots) {
    for (const char* metric : kMetricNames) {
      LineChart chart{std::string(metric) + " vs pool size", "pool size",
                      metric, {}};
      for (EvalMode mode : kAllEvalModes) {
        Series series{EvalModeName(mode), {}, {}};
        for (std::size_t i = 0; i < rows.size(); ++i) {
          for (const auto& s : rows[i].summary) {
            if (s.mode == mode && s.metric == metric) {
              series.x.push_back(static_cast<double>(values[i]));
              series.y.push_back(s.mean);
            }
          }
        }
        chart.series.push_back(std::move(series));
      }
      WriteSvg(chart, spec.output_dir /
                          (std::string("plot-") + metric + "-pool_size.svg"));
    }
  }
  return rows;
}

}  // namespace cotrain
