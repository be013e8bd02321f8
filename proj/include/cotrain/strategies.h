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

// Top-k based item selection for ablations.
//
// Negative selection for the ranker (candidates exclude everything the user
// interacted with in training):
//   gtop      uniform `selected` from the retriever's global top `global_top`
//   gtoprand  uniform `top_count` from the global top + `rand_count` uniform
//   ltop      top `selected` of a uniform pool of `local_pool`
//   ltoprand  top `top_count` of the local pool + `rand_count` uniform
//
// Item selection for distillation (candidates exclude only the positive):
//   rand      `selected` uniform items
//   top       retriever's top `selected`
//   toprand   retriever's top `top_count` + `rand_count` uniform
//
// None of these carries a sampling probability; callers use a plain softmax
// over the selected set (rand gets the constant uniform correction, which
// cancels).
//
// All uniform picks are without replacement within a group. Every result
// lists the top-derived group first.

#ifndef COTRAIN_STRATEGIES_H_
#define COTRAIN_STRATEGIES_H_

#include <span>
#include <string>
#include <vector>

#include "cotrain/dataset.h"
#include "cotrain/rng.h"

namespace cotrain {

enum class NegativeStrategy { kResample, kGTop, kGTopRand, kLTop, kLTopRand };
enum class KlItemStrategy { kResample, kRand, kTop, kTopRand };

const char* NegativeStrategyName(NegativeStrategy s);
const char* KlItemStrategyName(KlItemStrategy s);
NegativeStrategy ParseNegativeStrategy(const std::string& name);
KlItemStrategy ParseKlItemStrategy(const std::string& name);

inline constexpr NegativeStrategy kAllNegativeStrategies[] = {
    NegativeStrategy::kGTop, NegativeStrategy::kGTopRand,
    NegativeStrategy::kLTop, NegativeStrategy::kLTopRand,
    NegativeStrategy::kResample};
inline constexpr KlItemStrategy kAllKlItemStrategies[] = {
    KlItemStrategy::kRand, KlItemStrategy::kTop, KlItemStrategy::kTopRand,
    KlItemStrategy::kResample};

struct StrategySpec {
  std::size_t global_top = 500;
  std::size_t local_pool = 100;
  std::size_t top_count = 10;
  std::size_t rand_count = 10;
  std::size_t selected = 20;
};

// `retriever_scores` covers the catalog; `excluded` is sorted.

std::vector<ItemId> SelectNegativesGTop(std::span<const double> retriever_scores,
                                        std::span<const ItemId> excluded,
                                        const StrategySpec& spec, Rng& rng);
std::vector<ItemId> SelectNegativesGTopRand(
    std::span<const double> retriever_scores, std::span<const ItemId> excluded,
    const StrategySpec& spec, Rng& rng);
std::vector<ItemId> SelectNegativesLTop(std::span<const double> retriever_scores,
                                        std::span<const ItemId> excluded,
                                        const StrategySpec& spec, Rng& rng);
std::vector<ItemId> SelectNegativesLTopRand(
    std::span<const double> retriever_scores, std::span<const ItemId> excluded,
    const StrategySpec& spec, Rng& rng);

// Dispatch; kResample is not a selection strategy and throws.
std::vector<ItemId> SelectNegatives(NegativeStrategy strategy,
                                    std::span<const double> retriever_scores,
                                    std::span<const ItemId> excluded,
                                    const StrategySpec& spec, Rng& rng);

std::vector<ItemId> SelectKlItemsRand(std::int32_t num_items, ItemId positive,
                                      const StrategySpec& spec, Rng& rng);
std::vector<ItemId> SelectKlItemsTop(std::span<const double> retriever_scores,
                                     ItemId positive, const StrategySpec& spec);
std::vector<ItemId> SelectKlItemsTopRand(
    std::span<const double> retriever_scores, ItemId positive,
    const StrategySpec& spec, Rng& rng);

std::vector<ItemId> SelectKlItems(KlItemStrategy strategy,
                                  std::span<const double> retriever_scores,
                                  ItemId positive, const StrategySpec& spec,
                                  Rng& rng);

// `count` distinct picks from `candidates` (all of them if fewer), partial
// Fisher-Yates.
std::vector<ItemId> SampleWithoutReplacement(std::vector<ItemId> candidates,
                                             std::size_t count, Rng& rng);

}  // namespace cotrain

#endif  // COTRAIN_STRATEGIES_H_
