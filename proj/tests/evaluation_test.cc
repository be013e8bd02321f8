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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cotrain/dataset.h"
#include "cotrain/errors.h"
#include "cotrain/models.h"
#include "cotrain/rng.h"
#include "testing.h"

namespace cotrain {
namespace {

// Descending by score, ascending id on ties.
std::vector<ItemId> SortOracle(const std::vector<double>& scores,
                               const std::vector<ItemId>& pool) {
  std::vector<ItemId> out = pool;
  std::sort(out.begin(), out.end(), [&](ItemId a, ItemId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return out;
}

std::vector<ItemId> AllItems(int m) {
  std::vector<ItemId> v(m);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

const InteractionDataset& SmallDataset() {
  static const InteractionDataset ds = Synthesize(
      SyntheticConfig{.num_users = 300, .num_items = 120, .seed = 3}, 5);
  return ds;
}

TEST(RankOfTargetTest, UniqueMaximum) {
  const std::vector<double> s = {0.1, 0.9, 0.3};
  EXPECT_EQ(RankOfTarget(s, 1), 1u);
}

TEST(RankOfTargetTest, TieWithLowerIndexRanksBehind) {
  const std::vector<double> s = {0.5, 0.5, 0.1};
  EXPECT_EQ(RankOfTarget(s, 1), 2u);
  EXPECT_EQ(RankOfTarget(s, 0), 1u);
}

TEST(RankOfTargetTest, MatchesSortOracle) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const int m = 1 + static_cast<int>(rng.Index(60));
    std::vector<double> s(m);
    // Coarse values so ties happen.
    for (double& x : s) x = static_cast<double>(rng.Index(8));
    const ItemId target = static_cast<ItemId>(rng.Index(m));
    const auto order = SortOracle(s, AllItems(m));
    const auto pos = std::find(order.begin(), order.end(), target) -
                     order.begin();
    EXPECT_EQ(RankOfTarget(s, target), static_cast<std::size_t>(pos + 1));
  }
}

TEST(RankOfTargetTest, SubsetAndMissingTarget) {
  const std::vector<double> s = {0.2, 0.8};
  const std::vector<ItemId> items = {9, 4};
  EXPECT_EQ(RankOfTarget(s, 9, items), 2u);
  EXPECT_THROW(RankOfTarget(s, 5, items), std::invalid_argument);
}

TEST(MetricsAtKTest, HandValues) {
  const auto r1 = MetricsAtK(1, 20);
  EXPECT_EQ(r1.ndcg, 1.0);
  EXPECT_EQ(r1.recall, 1.0);
  EXPECT_EQ(r1.mrr, 1.0);
  const auto r3 = MetricsAtK(3, 20);
  EXPECT_NEAR(r3.ndcg, 0.5, 1e-15);
  EXPECT_EQ(r3.recall, 1.0);
  EXPECT_NEAR(r3.mrr, 1.0 / 3.0, 1e-15);
  const auto r21 = MetricsAtK(21, 20);
  EXPECT_EQ(r21.ndcg, 0.0);
  EXPECT_EQ(r21.recall, 0.0);
  EXPECT_EQ(r21.mrr, 0.0);
}

TEST(MetricsAtKTest, PerfectScorer) {
  std::vector<double> s(50, 0.0);
  s[17] = 1.0;
  const auto m = MetricsAtK(RankOfTarget(s, 17), 20);
  EXPECT_EQ(m.ndcg, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.mrr, 1.0);
}

TEST(MetricsAtKTest, NondecreasingInCutoff) {
  for (std::size_t rank = 1; rank < 60; ++rank) {
    for (int k = 1; k < 50; ++k) {
      const auto a = MetricsAtK(rank, k), b = MetricsAtK(rank, k + 1);
      EXPECT_LE(a.ndcg, b.ndcg);
      EXPECT_LE(a.recall, b.recall);
      EXPECT_LE(a.mrr, b.mrr);
    }
  }
}

TEST(TopKTest, FullCatalogSorted) {
  Rng rng(2);
  std::vector<double> s(30);
  for (double& x : s) x = rng.Normal();
  EXPECT_EQ(TopK(s, 30), SortOracle(s, AllItems(30)));
}

TEST(TopKTest, MatchesOracleAndHonorsExclusions) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const int m = 5 + static_cast<int>(rng.Index(80));
    std::vector<double> s(m);
    for (double& x : s) x = static_cast<double>(rng.Index(10));
    std::vector<ItemId> exclude;
    for (ItemId i = 0; i < m; ++i) {
      if (rng.Uniform() < 0.2) exclude.push_back(i);
    }
    std::vector<ItemId> pool;
    for (ItemId i = 0; i < m; ++i) {
      if (!std::binary_search(exclude.begin(), exclude.end(), i)) {
        pool.push_back(i);
      }
    }
    const std::size_t k = 1 + rng.Index(pool.size() + 1);
    auto expected = SortOracle(s, pool);
    expected.resize(std::min(k, expected.size()));
    const auto got = TopK(s, k, exclude);
    EXPECT_EQ(got, expected);
    for (ItemId i : got) {
      EXPECT_FALSE(std::binary_search(exclude.begin(), exclude.end(), i));
    }
  }
}

TEST(RetrieveTopKTest, UsesRetrieverScores) {
  const auto p = ScorerParams::Initialize(ModelKind::kRetriever, 40, 4, 5);
  const Context ctx{0, {1, 2}};
  EXPECT_EQ(RetrieveTopK(p, ctx, 10), TopK(ScoreAll(p, ctx), 10));
}

TEST(TwoStageTest, ComposeTwoSortsOracle) {
  Rng rng(4);
  const int m = 200;
  const auto retriever = ScorerParams::Initialize(ModelKind::kRetriever, m, 8, 6);
  const auto ranker = ScorerParams::Initialize(ModelKind::kRanker, m, 8, 7);
  for (int t = 0; t < 20; ++t) {
    const auto ctx = testing::RandomContext(rng, m, 6);
    std::vector<ItemId> exclude = ctx.history;
    std::sort(exclude.begin(), exclude.end());
    exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());
    const ItemId target = static_cast<ItemId>(rng.Index(m));
    std::vector<ItemId> pool;
    for (ItemId i = 0; i < m; ++i) {
      if (!std::binary_search(exclude.begin(), exclude.end(), i)) {
        pool.push_back(i);
      }
    }
    auto candidates = SortOracle(ScoreAll(retriever, ctx), pool);
    candidates.resize(50);
    const auto reranked = SortOracle(ScoreAll(ranker, ctx), candidates);
    const auto pred =
        TwoStagePredict(retriever, ranker, ctx, 50, 20, exclude, target);
    EXPECT_EQ(pred.candidates, candidates);
    EXPECT_EQ(pred.items,
              std::vector<ItemId>(reranked.begin(), reranked.begin() + 20));
    const auto it = std::find(reranked.begin(), reranked.end(), target);
    if (it == reranked.end()) {
      EXPECT_FALSE(pred.target_rank.has_value());
    } else {
      ASSERT_TRUE(pred.target_rank.has_value());
      EXPECT_EQ(*pred.target_rank,
                static_cast<std::size_t>(it - reranked.begin() + 1));
    }
  }
}

TEST(TwoStageTest, RerankWithSameScorerIsIdempotent) {
  const auto r = ScorerParams::Initialize(ModelKind::kRetriever, 80, 4, 8);
  const Context ctx{0, {3, 9, 4}};
  const auto pred = TwoStagePredict(r, r, ctx, 40, 20);
  EXPECT_EQ(pred.items, RetrieveTopK(r, ctx, 20));
}

TEST(TwoStageTest, RetrieveKBelowFinalKRejected) {
  const auto r = ScorerParams::Initialize(ModelKind::kRetriever, 10, 2, 1);
  EXPECT_THROW(TwoStagePredict(r, r, Context{0, {1}}, 5, 10),
               std::invalid_argument);
}

TEST(EvaluateTest, FullRetrievalMatchesRankerOnly) {
  const auto& ds = SmallDataset();
  const auto retriever =
      ScorerParams::Initialize(ModelKind::kRetriever, ds.num_items(), 8, 1);
  const auto ranker =
      ScorerParams::Initialize(ModelKind::kRanker, ds.num_items(), 8, 2);
  EvalConfig config;
  config.retrieve_k = static_cast<std::size_t>(ds.num_items());
  const auto res = Evaluate(ds, retriever, ranker, config);
  for (const auto& c : res.cases) EXPECT_EQ(c.rank[2], c.rank[1]);
  EXPECT_EQ(res.reports[2].ndcg, res.reports[1].ndcg);
  EXPECT_EQ(res.reports[2].recall, res.reports[1].recall);
}

TEST(EvaluateTest, MeansRecomputeFromCases) {
  const auto& ds = SmallDataset();
  const auto retriever =
      ScorerParams::Initialize(ModelKind::kRetriever, ds.num_items(), 8, 3);
  const auto ranker =
      ScorerParams::Initialize(ModelKind::kRanker, ds.num_items(), 8, 4);
  EvalConfig config;
  config.retrieve_k = 40;
  const auto res = Evaluate(ds, retriever, ranker, config, 7);
  ASSERT_EQ(res.cases.size(), static_cast<std::size_t>(ds.num_users()));
  for (EvalMode mode : kAllEvalModes) {
    const auto m = static_cast<std::size_t>(mode);
    double ndcg = 0, recall = 0, mrr = 0;
    for (const auto& c : res.cases) {
      ndcg += c.metrics[m].ndcg;
      recall += c.metrics[m].recall;
      mrr += c.metrics[m].mrr;
      if (c.rank[m] > 0) {
        const auto expect = MetricsAtK(c.rank[m], config.k);
        EXPECT_EQ(c.metrics[m].ndcg, expect.ndcg);
      }
    }
    const double n = static_cast<double>(res.cases.size());
    const auto& r = res.reports[m];
    EXPECT_EQ(r.epoch, 7);
    EXPECT_EQ(r.mode, mode);
    EXPECT_EQ(r.num_cases, res.cases.size());
    EXPECT_DOUBLE_EQ(r.ndcg, ndcg / n);
    EXPECT_DOUBLE_EQ(r.recall, recall / n);
    EXPECT_DOUBLE_EQ(r.mrr, mrr / n);
    for (double v : {r.ndcg, r.recall, r.mrr}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(EvaluateTest, MissedRetrievalCannotBeRecovered) {
  const auto& ds = SmallDataset();
  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    const auto retriever = testing::RandomParams(
        ModelKind::kRetriever, ds.num_items(), 8, 0, rng);
    const auto ranker =
        testing::RandomParams(ModelKind::kRanker, ds.num_items(), 8, 16, rng);
    EvalConfig config;
    config.retrieve_k = 30;
    const auto res = Evaluate(ds, retriever, ranker, config);
    EvalConfig wide = config;
    wide.k = 30;
    const auto at_retrieve_k = Evaluate(ds, retriever, ranker, wide);
    EXPECT_LE(res.reports[2].recall, at_retrieve_k.reports[0].recall);
    for (const auto& c : res.cases) {
      if (c.rank[2] > 0) EXPECT_LE(c.rank[0], 30u);
    }
  }
}

TEST(EvaluateTest, RandomScorerRecallNearChance) {
  const auto ds = Synthesize(
      SyntheticConfig{.num_users = 2000, .num_items = 500, .seed = 11}, 5);
  const auto retriever =
      ScorerParams::Initialize(ModelKind::kRetriever, ds.num_items(), 16, 99);
  const auto ranker =
      ScorerParams::Initialize(ModelKind::kRanker, ds.num_items(), 16, 98);
  EvalConfig config;
  config.retrieve_k = 100;
  const auto res = Evaluate(ds, retriever, ranker, config);
  // Per case the hit probability is k over the non-excluded catalog.
  double mean = 0.0, var = 0.0;
  for (const auto& c : res.cases) {
    auto excluded = ds.InteractedItems(c.user);
    std::erase(excluded, c.target);
    const double p =
        std::min(1.0, 20.0 / static_cast<double>(ds.num_items() -
                                                 excluded.size()));
    mean += p;
    var += p * (1.0 - p);
  }
  const double n = static_cast<double>(res.cases.size());
  mean /= n;
  const double sigma = std::sqrt(var) / n;
  EXPECT_NEAR(res.reports[0].recall, mean, 3.0 * sigma);
  EXPECT_NEAR(res.reports[1].recall, mean, 3.0 * sigma);
}

TEST(EvaluateTest, ShiftInvariance) {
  const auto& ds = SmallDataset();
  auto ranker =
      ScorerParams::Initialize(ModelKind::kRanker, ds.num_items(), 8, 5);
  const auto retriever =
      ScorerParams::Initialize(ModelKind::kRetriever, ds.num_items(), 8, 6);
  EvalConfig config;
  config.retrieve_k = 40;
  const auto before = Evaluate(ds, retriever, ranker, config);
  ranker.values().back() += 123.0;  // output bias shifts every ranker score
  const auto after = Evaluate(ds, retriever, ranker, config);
  for (std::size_t c = 0; c < before.cases.size(); ++c) {
    EXPECT_EQ(before.cases[c].rank, after.cases[c].rank);
  }
}

TEST(EvaluateTest, IndependentOfWorkerCount) {
  const auto& ds = SmallDataset();
  const auto retriever =
      ScorerParams::Initialize(ModelKind::kRetriever, ds.num_items(), 8, 7);
  const auto ranker =
      ScorerParams::Initialize(ModelKind::kRanker, ds.num_items(), 8, 8);
  EvalConfig config;
  config.retrieve_k = 40;
  const auto one = Evaluate(ds, retriever, ranker, config);
  config.workers = 4;
  const auto four = Evaluate(ds, retriever, ranker, config);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(ToJsonLine(one.reports[m]), ToJsonLine(four.reports[m]));
  }
}

TEST(EvaluateTest, RetrieveKBelowCutoffIsAConfigError) {
  const auto& ds = SmallDataset();
  const auto r =
      ScorerParams::Initialize(ModelKind::kRetriever, ds.num_items(), 4, 1);
  const auto k = ScorerParams::Initialize(ModelKind::kRanker, ds.num_items(), 4, 1);
  EvalConfig config;
  config.retrieve_k = 10;
  EXPECT_THROW(Evaluate(ds, r, k, config), ConfigError);
}

TEST(JsonLineTest, RoundTrip) {
  MetricsReport r;
  r.epoch = 3;
  r.mode = EvalMode::kRankerOnly;
  r.k = 20;
  r.ndcg = 0.123456789012345;
  r.recall = 0.5;
  r.mrr = 1.0 / 3.0;
  r.num_cases = 1999;
  const auto line = ToJsonLine(r);
  EXPECT_NE(line.find("\"mode\":\"ranker_only\""), std::string::npos);
  const auto back = FromJsonLine(line);
  EXPECT_EQ(back.epoch, r.epoch);
  EXPECT_EQ(back.mode, r.mode);
  EXPECT_EQ(back.k, r.k);
  EXPECT_EQ(back.ndcg, r.ndcg);
  EXPECT_EQ(back.recall, r.recall);
  EXPECT_EQ(back.mrr, r.mrr);
  EXPECT_EQ(back.num_cases, r.num_cases);
  EXPECT_THROW(FromJsonLine("{not json"), DataError);
}

}  // namespace
}  // namespace cotrain
