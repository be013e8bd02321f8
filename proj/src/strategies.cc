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

#include "cotrain/strategies.h"

#include <algorithm>

#include "cotrain/errors.h"
#include "cotrain/evaluation.h"

namespace cotrain {

const char* NegativeStrategyName(NegativeStrategy s) {
  switch (s) {
    case NegativeStrategy::kResample:
      return "resample";
    case NegativeStrategy::kGTop:
      return "gtop";
    case NegativeStrategy::kGTopRand:
      return "gtoprand";
    case NegativeStrategy::kLTop:
      return "ltop";
    case NegativeStrategy::kLTopRand:
      return "ltoprand";
  }
  return "unknown";
}

const char* KlItemStrategyName(KlItemStrategy s) {
  switch (s) {
    case KlItemStrategy::kResample:
      return "resample";
    case KlItemStrategy::kRand:
      return "rand";
    case KlItemStrategy::kTop:
      return "top";
    case KlItemStrategy::kTopRand:
      return "toprand";
  }
  return "unknown";
}

NegativeStrategy ParseNegativeStrategy(const std::string& name) {
  for (auto s : {NegativeStrategy::kResample, NegativeStrategy::kGTop,
                 NegativeStrategy::kGTopRand, NegativeStrategy::kLTop,
                 NegativeStrategy::kLTopRand}) {
    if (name == NegativeStrategyName(s)) return s;
  }
  throw ConfigError("unknown ranker negative strategy '" + name + "'");
}

KlItemStrategy ParseKlItemStrategy(const std::string& name) {
  for (auto s : {KlItemStrategy::kResample, KlItemStrategy::kRand,
                 KlItemStrategy::kTop, KlItemStrategy::kTopRand}) {
    if (name == KlItemStrategyName(s)) return s;
  }
  throw ConfigError("unknown KL item strategy '" + name + "'");
}

std::vector<ItemId> SampleWithoutReplacement(std::vector<ItemId> candidates,
                                             std::size_t count, Rng& rng) {
  count = std::min(count, candidates.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.Index(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(count);
  return candidates;
}

namespace {

std::vector<ItemId> Uninteracted(std::size_t num_items,
                                 std::span<const ItemId> excluded) {
  std::vector<ItemId> out;
  out.reserve(num_items);
  for (std::size_t i = 0; i < num_items; ++i) {
    const auto id = static_cast<ItemId>(i);
    if (!std::binary_search(excluded.begin(), excluded.end(), id)) {
      out.push_back(id);
    }
  }
  return out;
}

// Candidates ordered by retriever score (desc), ties by index, first k kept.
std::vector<ItemId> TopOf(std::vector<ItemId> candidates,
                          std::span<const double> scores, std::size_t k) {
  k = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + k,
                    candidates.end(), [&](ItemId a, ItemId b) {
                      return scores[a] > scores[b] ||
                             (scores[a] == scores[b] && a < b);
                    });
  candidates.resize(k);
  return candidates;
}

void Append(std::vector<ItemId>& out, const std::vector<ItemId>& more) {
  out.insert(out.end(), more.begin(), more.end());
}

}  // namespace

std::vector<ItemId> SelectNegativesGTop(std::span<const double> retriever_scores,
                                        std::span<const ItemId> excluded,
                                        const StrategySpec& spec, Rng& rng) {
  auto top = TopK(retriever_scores, spec.global_top, excluded);
  return SampleWithoutReplacement(std::move(top), spec.selected, rng);
}

std::vector<ItemId> SelectNegativesGTopRand(
    std::span<const double> retriever_scores, std::span<const ItemId> excluded,
    const StrategySpec& spec, Rng& rng) {
  auto top = TopK(retriever_scores, spec.global_top, excluded);
  auto out = SampleWithoutReplacement(std::move(top), spec.top_count, rng);
  Append(out, SampleWithoutReplacement(
                  Uninteracted(retriever_scores.size(), excluded),
                  spec.rand_count, rng));
  return out;
}

std::vector<ItemId> SelectNegativesLTop(std::span<const double> retriever_scores,
                                        std::span<const ItemId> excluded,
                                        const StrategySpec& spec, Rng& rng) {
  auto pool = SampleWithoutReplacement(
      Uninteracted(retriever_scores.size(), excluded), spec.local_pool, rng);
  return TopOf(std::move(pool), retriever_scores, spec.selected);
}

std::vector<ItemId> SelectNegativesLTopRand(
    std::span<const double> retriever_scores, std::span<const ItemId> excluded,
    const StrategySpec& spec, Rng& rng) {
  auto candidates = Uninteracted(retriever_scores.size(), excluded);
  auto pool = SampleWithoutReplacement(candidates, spec.local_pool, rng);
  auto out = TopOf(std::move(pool), retriever_scores, spec.top_count);
  Append(out, SampleWithoutReplacement(std::move(candidates), spec.rand_count,
                                       rng));
  return out;
}

std::vector<ItemId> SelectNegatives(NegativeStrategy strategy,
                                    std::span<const double> retriever_scores,
                                    std::span<const ItemId> excluded,
                                    const StrategySpec& spec, Rng& rng) {
  switch (strategy) {
    case NegativeStrategy::kGTop:
      return SelectNegativesGTop(retriever_scores, excluded, spec, rng);
    case NegativeStrategy::kGTopRand:
      return SelectNegativesGTopRand(retriever_scores, excluded, spec, rng);
    case NegativeStrategy::kLTop:
      return SelectNegativesLTop(retriever_scores, excluded, spec, rng);
    case NegativeStrategy::kLTopRand:
      return SelectNegativesLTopRand(retriever_scores, excluded, spec, rng);
    case NegativeStrategy::kResample:
      break;
  }
  throw ConfigError("resample negatives come from the two-step sampler");
}

std::vector<ItemId> SelectKlItemsRand(std::int32_t num_items, ItemId positive,
                                      const StrategySpec& spec, Rng& rng) {
  const ItemId excluded[] = {positive};
  return SampleWithoutReplacement(
      Uninteracted(static_cast<std::size_t>(num_items), excluded),
      spec.selected, rng);
}

std::vector<ItemId> SelectKlItemsTop(std::span<const double> retriever_scores,
                                     ItemId positive,
                                     const StrategySpec& spec) {
  const ItemId excluded[] = {positive};
  return TopK(retriever_scores, spec.selected, excluded);
}

std::vector<ItemId> SelectKlItemsTopRand(
    std::span<const double> retriever_scores, ItemId positive,
    const StrategySpec& spec, Rng& rng) {
  const ItemId excluded[] = {positive};
  auto out = TopK(retriever_scores, spec.top_count, excluded);
  Append(out, SampleWithoutReplacement(
                  Uninteracted(retriever_scores.size(), excluded),
                  spec.rand_count, rng));
  return out;
}

std::vector<ItemId> SelectKlItems(KlItemStrategy strategy,
                                  std::span<const double> retriever_scores,
                                  ItemId positive, const StrategySpec& spec,
                                  Rng& rng) {
  switch (strategy) {
    case KlItemStrategy::kRand:
      return SelectKlItemsRand(static_cast<std::int32_t>(retriever_scores.size()),
                               positive, spec, rng);
    case KlItemStrategy::kTop:
      return SelectKlItemsTop(retriever_scores, positive, spec);
    case KlItemStrategy::kTopRand:
      return SelectKlItemsTopRand(retriever_scores, positive, spec, rng);
    case KlItemStrategy::kResample:
      break;
  }
  throw ConfigError("resample KL items come from the two-step sampler");
}

}  // namespace cotrain
