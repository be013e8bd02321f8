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

// Cooperative training of a retriever and a ranker.
//
// For every (context, positive) pair:
//   1. draw a pool of n items from the static proposal Y and append the
//      positive;
//   2. score the pool with the retriever (constants from here on);
//   3. resample L items with probability softmax(score/T - log Y);
//   4. retriever objective: -sampled_log_softmax(M) + kl_weight * KL(P_S||Q_S),
//      the ranker scores inside the KL being constants;
//   5. ranker objective: -sampled_log_softmax(R), the sampler being constant.
// Both models step from the same pre-update parameters (simultaneous
// updates); per-pair gradients are averaged over the batch and applied with
// SGD plus L2 weight decay.

#ifndef COTRAIN_TRAINER_H_
#define COTRAIN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cotrain/dataset.h"
#include "cotrain/evaluation.h"
#include "cotrain/models.h"
#include "cotrain/sampler.h"
#include "cotrain/strategies.h"

namespace cotrain {

enum class SamplerMode {
  // Pool from Y, then adaptive resampling by the retriever.
  kTwoStep,
  // L draws straight from Y; the retriever plays no part in sampling.
  kStatic,
};

struct TrainConfig {
  int epochs = 10;
  std::size_t batch_size = 256;
  double learning_rate = 0.05;
  double weight_decay = 1e-6;

  std::size_t pool_size = 100;
  std::size_t num_samples = 20;
  double temperature = 1.0;
  ProposalKind proposal = ProposalKind::kUniform;
  double popularity_exponent = kDefaultPopularityExponent;
  SamplerMode sampler_mode = SamplerMode::kTwoStep;

  double kl_weight = 1.0;
  NegativeStrategy ranker_negative_strategy = NegativeStrategy::kResample;
  KlItemStrategy kl_item_strategy = KlItemStrategy::kResample;
  StrategySpec strategy;

  bool update_retriever = true;
  bool update_ranker = true;
  // Drop the ranker's own loss (the ranker then receives no gradient).
  bool ranker_loss_enabled = true;

  std::int32_t dim = 16;
  std::int32_t hidden = 0;  // 0 = 2 * dim
  std::uint64_t seed = 1;

  // Per-epoch evaluation; disabled when evaluate_each_epoch is false.
  bool evaluate_each_epoch = true;
  EvalConfig eval;

  // Throws ConfigError on violated invariants.
  void Validate() const;
};

struct EpochLosses {
  int epoch = 0;
  double retriever_loss = 0.0;  // mean of -sampled log-softmax, retriever
  double kl = 0.0;              // mean sampled KL
  double ranker_loss = 0.0;     // mean of -sampled log-softmax, ranker
  std::size_t num_pairs = 0;
};

struct TrainState {
  ScorerParams retriever;
  ScorerParams ranker;
  int epoch = 0;         // completed epochs
  std::uint64_t step = 0;  // steps taken in the current epoch
  std::uint64_t seed = 0;
  std::vector<EpochLosses> losses;
};

// Fresh models: retriever seeded from seed, ranker from a derived seed.
TrainState InitState(const TrainConfig& config,
                     const InteractionDataset& dataset);

struct PairOutcome {
  Gradient retriever_grad;
  Gradient ranker_grad;
  double retriever_loss = 0.0;
  double kl = 0.0;
  double ranker_loss = 0.0;
};

// Losses and gradients of one pair under the current parameters. `rng` is the
// pair's own stream. Throws NumericError (with a diagnostic dump) on a
// non-finite score or loss.
PairOutcome ComputePair(const TrainState& state, const TrainConfig& config,
                        const InteractionDataset& dataset,
                        const StaticProposal& proposal, const Example& pair,
                        Rng& rng);

struct StepStats {
  double retriever_loss = 0.0;
  double kl = 0.0;
  double ranker_loss = 0.0;
  std::size_t num_pairs = 0;
};

// One optimizer step over `batch`. Pair p of the step draws from the stream
// (seed, epoch, step, p), so a step is reproducible on its own.
StepStats TrainStep(TrainState& state, const TrainConfig& config,
                    const InteractionDataset& dataset,
                    const StaticProposal& proposal,
                    std::span<const Example> batch);

struct TrainResult {
  ScorerParams retriever;
  ScorerParams ranker;
  std::vector<MetricsReport> reports;  // three per epoch
  std::vector<EpochLosses> losses;
};

using EpochCallback =
    std::function<void(const TrainState&, std::span<const MetricsReport>)>;

TrainResult Train(const TrainConfig& config, const InteractionDataset& dataset,
                  const EpochCallback& on_epoch = {});

// Continues from `state` for config.epochs - state.epoch more epochs.
TrainResult Resume(TrainState state, const TrainConfig& config,
                   const InteractionDataset& dataset,
                   const EpochCallback& on_epoch = {});

enum class IndependentTarget { kRetriever, kRanker, kBoth };

// The configuration used for independent training: uniform static sampling,
// no distillation, only the requested model(s) updated.
TrainConfig IndependentConfig(TrainConfig config, IndependentTarget which);

// Standalone baselines; kBoth yields the two models of the plain two-stage
// pipeline.
TrainResult TrainIndependent(const TrainConfig& config,
                             const InteractionDataset& dataset,
                             IndependentTarget which,
                             const EpochCallback& on_epoch = {});

}  // namespace cotrain

#endif  // COTRAIN_TRAINER_H_
