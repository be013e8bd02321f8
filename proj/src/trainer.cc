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

#include "cotrain/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cotrain/errors.h"
#include "cotrain/estimators.h"

namespace cotrain {

void TrainConfig::Validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (num_samples < 1) throw ConfigError("sampler.num_samples must be >= 1");
  if (pool_size < num_samples) {
    throw ConfigError("sampler.pool_size must be >= sampler.num_samples");
  }
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (!(kl_weight >= 0.0)) throw ConfigError("kl_weight must be >= 0");
  if (dim < 1) throw ConfigError("model dim must be >= 1");
  if (hidden < 0) throw ConfigError("model hidden width must be >= 0");
  if (strategy.top_count + strategy.rand_count == 0 || strategy.selected == 0) {
    throw ConfigError("strategy selections must be non-empty");
  }
  if (eval.retrieve_k < static_cast<std::size_t>(eval.k) || eval.k < 1) {
    throw ConfigError("eval.retrieve_k must be >= eval.k >= 1");
  }
}

TrainState InitState(const TrainConfig& config,
                     const InteractionDataset& dataset) {
  TrainState state;
  state.seed = config.seed;
  state.retriever =
      ScorerParams::Initialize(ModelKind::kRetriever, dataset.num_items(),
                               config.dim, SplitMix64(config.seed ^ 0x1ULL));
  state.ranker = ScorerParams::Initialize(
      ModelKind::kRanker, dataset.num_items(), config.dim,
      SplitMix64(config.seed ^ 0x2ULL), config.hidden);
  return state;
}

namespace {

// Sub-streams of a pair's generator, so toggling one loss term never shifts
// the draws of another.
enum Stream : std::uint64_t { kSamplerStream = 1, kKlStream = 2, kNegStream = 3 };

[[noreturn]] void NonFinite(const char* what, double value,
                            const TrainState& state, const Example& pair, std::span<const ItemId> items,
                            const BoundScorer& retriever,
                            const BoundScorer& ranker) {
  std::ostringstream msg;
  msg << "non-finite " << what << " (" << value << ") at epoch "
      << state.epoch << " step " << state.step << ", user "
      << pair.context.user << ", positive " << pair.item << "; history [";
  for (std::size_t i = 0; i < pair.context.history.size(); ++i) {
    msg << (i ? " " : "") << pair.context.history[i];
  }
  msg << "]; item/retriever/ranker scores:";
  msg << " " << pair.item << ":" << retriever.Score(pair.item) << "/"
      << ranker.Score(pair.item);
  for (ItemId i : items) {
    msg << " " << i << ":" << retriever.Score(i) << "/" << ranker.Score(i);
  }
  throw NumericError(msg.str());
}

std::vector<ItemId> WithPositive(std::vector<ItemId> items, ItemId positive) {
  items.push_back(positive);
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

}  // namespace

PairOutcome ComputePair(const TrainState& state, const TrainConfig& config,
                        const InteractionDataset& dataset,
                        const StaticProposal& proposal, const Example& pair,
                        Rng& rng) {
  const Context& ctx = pair.context;
  const ItemId positive = pair.item;
  const BoundScorer retriever(state.retriever, ctx);
  const BoundScorer ranker(state.ranker, ctx);

  Rng sampler_rng = rng.Split(kSamplerStream);
  Rng kl_rng = rng.Split(kKlStream);
  Rng neg_rng = rng.Split(kNegStream);

  SampleSet samples;
  if (config.sampler_mode == SamplerMode::kTwoStep) {
    samples = TwoStepSample(
                  proposal, [&](ItemId i) { return retriever.Score(i); },
                  positive, config.pool_size, config.num_samples,
                  config.temperature, sampler_rng)
                  .samples;
  } else {
    samples = StaticSample(proposal, positive, config.num_samples, sampler_rng);
  }

  std::vector<double> catalog_scores;
  auto retriever_catalog = [&]() -> const std::vector<double>& {
    if (catalog_scores.empty()) catalog_scores = retriever.ScoreAll();
    return catalog_scores;
  };

  PairOutcome out;
  out.retriever_grad = Gradient(state.retriever.dim());
  out.ranker_grad = Gradient(state.ranker.dim());

  if (config.update_retriever) {
    auto ssm = SampledLogSoftmaxWithGrad(retriever, positive,
                                         samples.positive_log_q, samples.items,
                                         samples.log_q);
    out.retriever_loss = -ssm.value;
    if (!std::isfinite(out.retriever_loss)) {
      NonFinite("retriever loss", out.retriever_loss, state, pair, samples.items,
                retriever, ranker);
    }
    out.retriever_grad.Add(ssm.gradient, -1.0);

    if (config.kl_weight > 0.0) {
      std::vector<ItemId> kl_items;
      std::vector<double> kl_log_q;
      switch (config.kl_item_strategy) {
        case KlItemStrategy::kResample:
          kl_items = samples.items;
          kl_log_q = samples.log_q;
          break;
        case KlItemStrategy::kRand:
          kl_items = SelectKlItemsRand(dataset.num_items(), positive,
                                       config.strategy, kl_rng);
          kl_log_q.assign(kl_items.size(),
                          -std::log(static_cast<double>(dataset.num_items())));
          break;
        case KlItemStrategy::kTop:
        case KlItemStrategy::kTopRand:
          kl_items = SelectKlItems(config.kl_item_strategy, retriever_catalog(),
                                   positive, config.strategy, kl_rng);
          break;
      }
      // Teacher scores are plain numbers here: no path back to the ranker.
      std::vector<double> teacher(kl_items.size());
      for (std::size_t j = 0; j < kl_items.size(); ++j) {
        teacher[j] = ranker.Score(kl_items[j]);
      }
      auto kl = SampledKlWithRetrieverGrad(retriever, kl_items, kl_log_q,
                                           teacher);
      out.kl = kl.value;
      if (!std::isfinite(out.kl)) {
        NonFinite("sampled KL", out.kl, state, pair, kl_items, retriever, ranker);
      }
      out.retriever_grad.Add(kl.gradient, config.kl_weight);
    }
  }

  if (config.update_ranker && config.ranker_loss_enabled) {
    ObjectiveAndGrad ssm;
    if (config.ranker_negative_strategy == NegativeStrategy::kResample) {
      ssm = SampledLogSoftmaxWithGrad(ranker, positive, samples.positive_log_q,
                                      samples.items, samples.log_q);
    } else {
      const auto excluded =
          WithPositive(dataset.InteractedItems(ctx.user), positive);
      const auto negatives =
          SelectNegatives(config.ranker_negative_strategy, retriever_catalog(),
                          excluded, config.strategy, neg_rng);
      ssm = SampledLogSoftmaxWithGrad(ranker, positive, std::nullopt,
                                      negatives, {});
    }
    out.ranker_loss = -ssm.value;
    if (!std::isfinite(out.ranker_loss)) {
      NonFinite("ranker loss", out.ranker_loss, state, pair, samples.items, retriever,
                ranker);
    }
    out.ranker_grad.Add(ssm.gradient, -1.0);
  }
  return out;
}

StepStats TrainStep(TrainState& state, const TrainConfig& config,
                    const InteractionDataset& dataset,
                    const StaticProposal& proposal,
                    std::span<const Example> batch) {
  StepStats stats;
  if (batch.empty()) return stats;
  const Rng base(state.seed);
  const std::uint64_t step_key =
      (static_cast<std::uint64_t>(state.epoch) << 32) | state.step;

  Gradient retriever_grad(state.retriever.dim());
  Gradient ranker_grad(state.ranker.dim());
  for (std::size_t p = 0; p < batch.size(); ++p) {
    Rng rng = base.Split(step_key, p);
    const PairOutcome o =
        ComputePair(state, config, dataset, proposal, batch[p], rng);
    retriever_grad.Add(o.retriever_grad);
    ranker_grad.Add(o.ranker_grad);
    stats.retriever_loss += o.retriever_loss;
    stats.kl += o.kl;
    stats.ranker_loss += o.ranker_loss;
  }
  stats.num_pairs = batch.size();
  const double inv = 1.0 / static_cast<double>(batch.size());
  retriever_grad.Scale(inv);
  ranker_grad.Scale(inv);

  // Both gradients were taken at the pre-step parameters.
  if (config.update_retriever) {
    ApplySgd(state.retriever, retriever_grad, config.learning_rate,
             config.weight_decay);
  }
  if (config.update_ranker) {
    ApplySgd(state.ranker, ranker_grad, config.learning_rate,
             config.weight_decay);
  }
  ++state.step;
  return stats;
}

namespace {

StaticProposal MakeProposal(const TrainConfig& config,
                            const InteractionDataset& dataset) {
  if (config.proposal == ProposalKind::kPopularity) {
    return StaticProposal::Popularity(dataset.popularity(),
                                      config.popularity_exponent);
  }
  return StaticProposal::Uniform(dataset.num_items());
}

constexpr std::uint64_t kShuffleStream = 0x5eed5eedULL;

}  // namespace

TrainResult Resume(TrainState state, const TrainConfig& config,
                   const InteractionDataset& dataset,
                   const EpochCallback& on_epoch) {
  config.Validate();
  if (dataset.num_users() == 0) throw DataError("empty dataset");
  const auto pairs = dataset.TrainingPairs();
  const StaticProposal proposal = MakeProposal(config, dataset);

  TrainResult result;
  std::vector<std::size_t> order(pairs.size());
  std::vector<Example> batch;
  while (state.epoch < config.epochs) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = Rng(state.seed).Split(kShuffleStream, state.epoch);
    Shuffle(order.begin(), order.end(), shuffle_rng);

    EpochLosses losses;
    losses.epoch = state.epoch + 1;
    state.step = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(pairs[order[i]]);
      const StepStats s = TrainStep(state, config, dataset, proposal, batch);
      losses.retriever_loss += s.retriever_loss;
      losses.kl += s.kl;
      losses.ranker_loss += s.ranker_loss;
      losses.num_pairs += s.num_pairs;
    }
    if (losses.num_pairs > 0) {
      const double n = static_cast<double>(losses.num_pairs);
      losses.retriever_loss /= n;
      losses.kl /= n;
      losses.ranker_loss /= n;
    }
    ++state.epoch;
    state.step = 0;
    state.losses.push_back(losses);

    std::vector<MetricsReport> epoch_reports;
    if (config.evaluate_each_epoch) {
      const auto eval = Evaluate(dataset, state.retriever, state.ranker,
                                 config.eval, state.epoch);
      epoch_reports.assign(eval.reports.begin(), eval.reports.end());
      result.reports.insert(result.reports.end(), epoch_reports.begin(),
                            epoch_reports.end());
    }
    if (on_epoch) on_epoch(state, epoch_reports);
  }
  result.retriever = std::move(state.retriever);
  result.ranker = std::move(state.ranker);
  result.losses = std::move(state.losses);
  return result;
}

TrainResult Train(const TrainConfig& config, const InteractionDataset& dataset,
                  const EpochCallback& on_epoch) {
  config.Validate();
  return Resume(InitState(config, dataset), config, dataset, on_epoch);
}

TrainConfig IndependentConfig(TrainConfig config, IndependentTarget which) {
  config.sampler_mode = SamplerMode::kStatic;
  config.proposal = ProposalKind::kUniform;
  config.kl_weight = 0.0;
  config.ranker_negative_strategy = NegativeStrategy::kResample;
  config.update_retriever = which != IndependentTarget::kRanker;
  config.update_ranker = which != IndependentTarget::kRetriever;
  return config;
}

TrainResult TrainIndependent(const TrainConfig& config,
                             const InteractionDataset& dataset,
                             IndependentTarget which,
                             const EpochCallback& on_epoch) {
  return Train(IndependentConfig(config, which), dataset, on_epoch);
}

}  // namespace cotrain
