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

#include "cotrain/evaluation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cotrain/errors.h"
#include "json.hpp"

namespace cotrain {

const char* EvalModeName(EvalMode mode) {
  switch (mode) {
    case EvalMode::kRetrieverOnly:
      return "retriever_only";
    case EvalMode::kRankerOnly:
      return "ranker_only";
    case EvalMode::kTwoStage:
      return "two_stage";
  }
  return "unknown";
}

namespace {

EvalMode ParseEvalMode(const std::string& name) {
  for (EvalMode m : kAllEvalModes) {
    if (name == EvalModeName(m)) return m;
  }
  throw DataError("unknown evaluation mode '" + name + "'");
}

// True if (score_a, a) ranks strictly ahead of (score_b, b).
bool RanksAhead(double score_a, ItemId a, double score_b, ItemId b) {
  return score_a > score_b || (score_a == score_b && a < b);
}

bool Contains(std::span<const ItemId> sorted, ItemId item) {
  return std::binary_search(sorted.begin(), sorted.end(), item);
}

}  // namespace

std::string ToJsonLine(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["epoch"] = report.epoch;
  j["mode"] = EvalModeName(report.mode);
  j["k"] = report.k;
  j["ndcg"] = report.ndcg;
  j["recall"] = report.recall;
  j["mrr"] = report.mrr;
  j["num_cases"] = report.num_cases;
  return j.dump();
}

MetricsReport FromJsonLine(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    MetricsReport r;
    r.epoch = j.at("epoch").get<int>();
    r.mode = ParseEvalMode(j.at("mode").get<std::string>());
    r.k = j.at("k").get<int>();
    r.ndcg = j.at("ndcg").get<double>();
    r.recall = j.at("recall").get<double>();
    r.mrr = j.at("mrr").get<double>();
    r.num_cases = j.at("num_cases").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad metrics line: ") + e.what());
  }
}

std::size_t RankOfTarget(std::span<const double> scores, ItemId target,
                         std::span<const ItemId> items) {
  auto item_at = [&](std::size_t j) {
    return items.empty() ? static_cast<ItemId>(j) : items[j];
  };
  std::optional<std::size_t> target_pos;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (item_at(j) == target) {
      target_pos = j;
      break;
    }
  }
  if (!target_pos) {
    throw std::invalid_argument("target " + std::to_string(target) +
                                " is not among the candidates");
  }
  const double t = scores[*target_pos];
  std::size_t rank = 1;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (j != *target_pos && RanksAhead(scores[j], item_at(j), t, target)) {
      ++rank;
    }
  }
  return rank;
}

CaseMetrics MetricsAtK(std::size_t rank, int k) {
  if (rank < 1) throw std::invalid_argument("rank is 1-based");
  if (rank > static_cast<std::size_t>(k)) return {};
  const double r = static_cast<double>(rank);
  return CaseMetrics{1.0 / std::log2(r + 1.0), 1.0, 1.0 / r};
}

std::vector<ItemId> TopK(std::span<const double> scores, std::size_t k,
                         std::span<const ItemId> exclude) {
  std::vector<ItemId> ids;
  ids.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto id = static_cast<ItemId>(i);
    if (!Contains(exclude, id)) ids.push_back(id);
  }
  k = std::min(k, ids.size());
  auto ahead = [&](ItemId a, ItemId b) {
    return RanksAhead(scores[a], a, scores[b], b);
  };
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(), ahead);
  ids.resize(k);
  return ids;
}

std::vector<ItemId> RetrieveTopK(const ScorerParams& retriever,
                                 const Context& ctx, std::size_t k,
                                 std::span<const ItemId> exclude) {
  return TopK(ScoreAll(retriever, ctx), k, exclude);
}

namespace {

// Ranker-reranked candidates plus the target's rank among them.
TwoStagePrediction Rerank(std::vector<ItemId> candidates,
                          std::span<const double> ranker_scores,
                          std::size_t final_k, std::optional<ItemId> target) {
  TwoStagePrediction out;
  std::vector<ItemId> order = candidates;
  std::sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    return RanksAhead(ranker_scores[a], a, ranker_scores[b], b);
  });
  if (target.has_value()) {
    const auto it = std::find(order.begin(), order.end(), *target);
    if (it != order.end()) {
      out.target_rank = static_cast<std::size_t>(it - order.begin()) + 1;
    }
  }
  order.resize(std::min(final_k, order.size()));
  out.items = std::move(order);
  out.candidates = std::move(candidates);
  return out;
}

}  // namespace

TwoStagePrediction TwoStagePredict(const ScorerParams& retriever,
                                   const ScorerParams& ranker,
                                   const Context& ctx, std::size_t retrieve_k,
                                   std::size_t final_k,
                                   std::span<const ItemId> exclude,
                                   std::optional<ItemId> target) {
  if (retrieve_k < final_k) {
    throw std::invalid_argument("retrieve_k must be at least final_k");
  }
  auto candidates = RetrieveTopK(retriever, ctx, retrieve_k, exclude);
  BoundScorer rank_scorer(ranker, ctx);
  std::vector<double> ranker_scores(static_cast<std::size_t>(ranker.num_items()),
                                    0.0);
  for (ItemId i : candidates) ranker_scores[i] = rank_scorer.Score(i);
  return Rerank(std::move(candidates), ranker_scores, final_k, target);
}

namespace {

CaseResult EvaluateCase(const InteractionDataset& dataset,
                        const ScorerParams& retriever,
                        const ScorerParams& ranker, const EvalConfig& config,
                        const Example& test) {
  CaseResult out;
  out.user = test.context.user;
  out.target = test.item;
  std::vector<ItemId> exclude;
  if (config.exclude_interacted) {
    exclude = dataset.InteractedItems(test.context.user);
    exclude.erase(std::remove(exclude.begin(), exclude.end(), test.item),
                  exclude.end());
  }
  const auto retriever_scores = ScoreAll(retriever, test.context);
  const auto ranker_scores = ScoreAll(ranker, test.context);

  auto full_rank = [&](const std::vector<double>& scores) {
    const double t = scores[test.item];
    std::size_t rank = 1;
    for (ItemId i = 0; i < static_cast<ItemId>(scores.size()); ++i) {
      if (i != test.item && !Contains(exclude, i) &&
          RanksAhead(scores[i], i, t, test.item)) {
        ++rank;
      }
    }
    return rank;
  };
  const int k = config.k;
  out.rank[0] = full_rank(retriever_scores);
  out.rank[1] = full_rank(ranker_scores);
  out.metrics[0] = MetricsAtK(out.rank[0], k);
  out.metrics[1] = MetricsAtK(out.rank[1], k);

  const auto prediction =
      Rerank(TopK(retriever_scores, config.retrieve_k, exclude), ranker_scores,
             static_cast<std::size_t>(k), test.item);
  out.rank[2] = prediction.target_rank.value_or(0);
  if (prediction.target_rank) out.metrics[2] = MetricsAtK(out.rank[2], k);
  return out;
}

}  // namespace

EvaluationResult Evaluate(const InteractionDataset& dataset,
                          const ScorerParams& retriever,
                          const ScorerParams& ranker, const EvalConfig& config,
                          int epoch) {
  if (config.retrieve_k < static_cast<std::size_t>(config.k)) {
    throw ConfigError("retrieve_k must be at least the metric cutoff");
  }
  const auto tests = dataset.TestCases();
  EvaluationResult result;
  result.cases.resize(tests.size());

  const int workers = std::max(1, config.workers);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      result.cases[c] =
          EvaluateCase(dataset, retriever, ranker, config, tests[c]);
    }
  };
  if (workers == 1 || tests.size() < 2) {
    run_range(0, tests.size());
  } else {
    std::vector<std::jthread> threads;
    const std::size_t chunk = (tests.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < tests.size(); begin += chunk) {
      threads.emplace_back(run_range, begin,
                           std::min(tests.size(), begin + chunk));
    }
  }

  for (EvalMode mode : kAllEvalModes) {
    const auto m = static_cast<std::size_t>(mode);
    MetricsReport& r = result.reports[m];
    r.epoch = epoch;
    r.mode = mode;
    r.k = config.k;
    r.num_cases = result.cases.size();
    for (const auto& c : result.cases) {
      r.ndcg += c.metrics[m].ndcg;
      r.recall += c.metrics[m].recall;
      r.mrr += c.metrics[m].mrr;
    }
    if (r.num_cases > 0) {
      const double n = static_cast<double>(r.num_cases);
      r.ndcg /= n;
      r.recall /= n;
      r.mrr /= n;
    }
  }
  return result;
}

}  // namespace cotrain
