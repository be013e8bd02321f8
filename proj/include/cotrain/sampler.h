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

// Static proposals and the two-step adaptive sampler.
//
// Step one draws a pool C of n items i.i.d. from a static proposal Y. Step two
// resamples L items from C (plus the positive, when given) with replacement,
// slot j having probability
//
//   Q_C(j) = exp(s_j / T - log Y(o_j)) / sum_k exp(s_k / T - log Y(o_k)),
//
// where s are retriever scores. As n grows the marginal of a resampled item
// tends to softmax(s / T) over the full catalog.

#ifndef COTRAIN_SAMPLER_H_
#define COTRAIN_SAMPLER_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <span>
#include <string>
#include <vector>

#include "cotrain/dataset.h"
#include "cotrain/errors.h"
#include "cotrain/rng.h"

namespace cotrain {

enum class ProposalKind { kUniform, kPopularity };

const char* ProposalKindName(ProposalKind kind);
ProposalKind ParseProposalKind(const std::string& name);

inline constexpr double kDefaultPopularityExponent = 0.75;

// Normalized categorical distribution over the catalog with O(1) draws
// (Walker/Vose alias table).
class StaticProposal {
 public:
  static StaticProposal Uniform(std::int32_t num_items);
  // Y(i) proportional to count_i^exponent. Zero counts get zero mass.
  static StaticProposal Popularity(std::span<const std::int64_t> counts,
                                   double exponent = kDefaultPopularityExponent);

  ProposalKind kind() const { return kind_; }
  std::int32_t num_items() const {
    return static_cast<std::int32_t>(log_probs_.size());
  }
  double log_prob(ItemId i) const { return log_probs_[i]; }
  std::span<const double> log_probs() const { return log_probs_; }

  ItemId Draw(Rng& rng) const;

 private:
  StaticProposal(ProposalKind kind, std::vector<double> weights);

  ProposalKind kind_;
  std::vector<double> log_probs_;
  std::vector<double> alias_prob_;
  std::vector<ItemId> alias_;
};

struct CandidatePool {
  // n draws from Y, then the positive as a final slot when present.
  std::vector<ItemId> items;
  std::vector<double> static_log_y;
  // Retriever scores, recorded as constants.
  std::vector<double> retriever_scores;
  double temperature = 1.0;
  bool has_positive = false;
};

// Resampling distribution over a pool. Every slot is its own softmax entry,
// so an item drawn twice into the pool holds two slots.
struct ResampleDistribution {
  std::vector<double> slot_log_prob;
  // Running sum of exp(slot_log_prob), for inverse-CDF draws.
  std::vector<double> cumulative;

  // log of the total mass of the slots holding `item`, i.e. the probability
  // that one resampling draw returns it; -inf if the item is not in the pool.
  double ItemLogProb(const CandidatePool& pool, ItemId item) const;
};

struct SampleSet {
  std::vector<ItemId> items;
  // log Q_{C u {k}}(item | c) for each drawn element, item-level (summed over
  // duplicate slots) and normalized over the pool.
  std::vector<double> log_q;
  // Same quantity for the positive when it was appended to the pool.
  std::optional<double> positive_log_q;
};

struct TwoStepResult {
  CandidatePool pool;
  SampleSet samples;
};

// n i.i.d. draws from the proposal; duplicates kept.
std::vector<ItemId> DrawPool(const StaticProposal& proposal, std::size_t n,
                             Rng& rng);

// Log-domain softmax of score/T - log Y over pool slots. Throws NumericError
// on a non-finite score and ConfigError on a non-positive temperature.
ResampleDistribution ResampleWeights(const CandidatePool& pool);

// Distinct pool items (ascending) with their item-level log-probabilities.
std::vector<std::pair<ItemId, double>> DistinctItemLogProbs(
    const CandidatePool& pool, const ResampleDistribution& dist);

// L draws with replacement from the pool under `dist`.
SampleSet Resample(const CandidatePool& pool, const ResampleDistribution& dist,
                   std::size_t num_samples, Rng& rng);

// Pool of n from `proposal`, positive appended when given, scores from
// `score(item)` treated as constants, then L resampled items.
template <typename ScoreFn>
TwoStepResult TwoStepSample(const StaticProposal& proposal, ScoreFn&& score,
                            std::optional<ItemId> positive, std::size_t n,
                            std::size_t num_samples, double temperature,
                            Rng& rng) {
  if (n < 1) throw ConfigError("pool size must be at least 1");
  if (num_samples < 1) throw ConfigError("sample count must be at least 1");
  TwoStepResult out;
  CandidatePool& pool = out.pool;
  pool.items = DrawPool(proposal, n, rng);
  if (positive.has_value()) {
    pool.items.push_back(*positive);
    pool.has_positive = true;
  }
  pool.temperature = temperature;
  pool.static_log_y.reserve(pool.items.size());
  pool.retriever_scores.reserve(pool.items.size());
  for (ItemId i : pool.items) {
    pool.static_log_y.push_back(proposal.log_prob(i));
    pool.retriever_scores.push_back(static_cast<double>(score(i)));
  }
  const ResampleDistribution dist = ResampleWeights(pool);
  out.samples = Resample(pool, dist, num_samples, rng);
  if (positive.has_value()) {
    out.samples.positive_log_q = dist.ItemLogProb(pool, *positive);
  }
  return out;
}

// L draws straight from the static proposal, log_q = log Y. Used by the
// independently trained baselines.
SampleSet StaticSample(const StaticProposal& proposal,
                       std::optional<ItemId> positive, std::size_t num_samples,
                       Rng& rng);

}  // namespace cotrain

#endif  // COTRAIN_SAMPLER_H_
