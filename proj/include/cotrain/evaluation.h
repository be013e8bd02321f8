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

// Single-target ranking metrics, brute-force top-k retrieval, and the
// retrieve-then-rerank prediction pipeline. Ties are always broken by the
// smaller item index ranking first.

#ifndef COTRAIN_EVALUATION_H_
#define COTRAIN_EVALUATION_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cotrain/dataset.h"
#include "cotrain/models.h"

namespace cotrain {

enum class EvalMode { kRetrieverOnly = 0, kRankerOnly = 1, kTwoStage = 2 };
inline constexpr std::array<EvalMode, 3> kAllEvalModes = {
    EvalMode::kRetrieverOnly, EvalMode::kRankerOnly, EvalMode::kTwoStage};

const char* EvalModeName(EvalMode mode);

struct CaseMetrics {
  double ndcg = 0.0;
  double recall = 0.0;
  double mrr = 0.0;
};

struct MetricsReport {
  int epoch = 0;
  EvalMode mode = EvalMode::kTwoStage;
  int k = 20;
  double ndcg = 0.0;
  double recall = 0.0;
  double mrr = 0.0;
  std::size_t num_cases = 0;
};

// One JSON object per line: epoch, mode, k, ndcg, recall, mrr, num_cases.
std::string ToJsonLine(const MetricsReport& report);
MetricsReport FromJsonLine(const std::string& line);

// 1 + #candidates with a greater score + #tied candidates with a smaller
// index. `items[j]` is the item id of `scores[j]`; an empty `items` means
// position j is item j. Throws std::invalid_argument if target is absent.
std::size_t RankOfTarget(std::span<const double> scores, ItemId target,
                         std::span<const ItemId> items = {});

// Zero on all three when rank > k; otherwise 1/log2(rank+1), 1, 1/rank.
CaseMetrics MetricsAtK(std::size_t rank, int k);

// Top-k of `scores` (indexed by item) excluding `exclude` (sorted), score
// descending then index ascending. Returns fewer than k if the catalog minus
// exclusions is smaller.
std::vector<ItemId> TopK(std::span<const double> scores, std::size_t k,
                         std::span<const ItemId> exclude = {});

std::vector<ItemId> RetrieveTopK(const ScorerParams& retriever,
                                 const Context& ctx, std::size_t k,
                                 std::span<const ItemId> exclude = {});

struct TwoStagePrediction {
  std::vector<ItemId> items;         // final_k items, reranked
  std::vector<ItemId> candidates;    // retrieve_k items from the retriever
  std::optional<std::size_t> target_rank;  // within the rerank; none if missed
};

// Retrieve retrieve_k with the retriever, rerank them with the ranker, keep
// final_k. When `target` is given its rank within the reranked candidates is
// recorded.
TwoStagePrediction TwoStagePredict(const ScorerParams& retriever,
                                   const ScorerParams& ranker,
                                   const Context& ctx, std::size_t retrieve_k,
                                   std::size_t final_k,
                                   std::span<const ItemId> exclude = {},
                                   std::optional<ItemId> target = std::nullopt);

struct EvalConfig {
  int k = 20;
  std::size_t retrieve_k = 500;
  bool exclude_interacted = true;
  // Worker threads; results do not depend on this.
  int workers = 1;
};

struct CaseResult {
  UserId user = 0;
  ItemId target = 0;
  // Rank under each mode (0 = missed by retrieval, two-stage only).
  std::array<std::size_t, 3> rank{};
  std::array<CaseMetrics, 3> metrics{};
};

struct EvaluationResult {
  std::array<MetricsReport, 3> reports;  // indexed by EvalMode
  std::vector<CaseResult> cases;
};

// Runs every test case through the three modes. Interacted training items
// other than the target are removed from candidacy when exclude_interacted.
EvaluationResult Evaluate(const InteractionDataset& dataset,
                          const ScorerParams& retriever,
                          const ScorerParams& ranker, const EvalConfig& config,
                          int epoch = 0);

}  // namespace cotrain

#endif  // COTRAIN_EVALUATION_H_
