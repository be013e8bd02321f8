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

#include "cotrain/oracle.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "cotrain/rng.h"

namespace cotrain::oracle {
namespace {

TEST(ExactSoftmaxTest, ConstantScores) {
  const std::vector<double> s(8, 2.5);
  for (double p : ExactSoftmax(s)) EXPECT_NEAR(p, 0.125, 1e-15);
}

TEST(ExactSoftmaxTest, HandValue) {
  const std::vector<double> s = {0.0, std::log(3.0)};
  const auto p = ExactSoftmax(s);
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
}

TEST(ExactSoftmaxTest, NormalizedAndTemperatureScaled) {
  Rng rng(1);
  std::vector<double> s(300);
  for (double& x : s) x = rng.Normal() * 20.0;
  for (double t : {0.5, 1.0, 4.0}) {
    const auto p = ExactSoftmax(s, t);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    EXPECT_NEAR(p[3] / p[7], std::exp((s[3] - s[7]) / t),
                1e-9 * std::exp((s[3] - s[7]) / t));
  }
}

TEST(ExactSoftmaxTest, CatalogSizeGuard) {
  const std::vector<double> big(kMaxOracleItems + 1, 0.0);
  EXPECT_THROW(ExactSoftmax(big), std::invalid_argument);
}

TEST(ExactKlTest, IdenticalIsZero) {
  const std::vector<double> s = {1.0, -2.0, 0.5};
  EXPECT_NEAR(ExactKl(s, s), 0.0, 1e-15);
}

TEST(ExactKlTest, TwoItemHandValue) {
  const std::vector<double> p = {0.0, std::log(3.0)}, q = {0.0, 0.0};
  EXPECT_NEAR(ExactKl(p, q), 0.130812, 1e-6);
}

TEST(ExactKlTest, GibbsInequality) {
  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const std::size_t m = 1 + rng.Index(40);
    std::vector<double> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = rng.Normal() * 3.0;
      b[i] = rng.Normal() * 3.0;
    }
    EXPECT_GE(ExactKl(a, b), -1e-15);
  }
}

TEST(ExactLogSoftmaxTest, EqualScores) {
  const std::vector<double> s(20, -4.0);
  EXPECT_NEAR(ExactLogSoftmax(s, 5), -std::log(20.0), 1e-14);
}

TEST(ExactLogSoftmaxTest, FiveItemHandValue) {
  const std::vector<double> s = {1.0, 2.0, 0.5, -1.0, 3.0};
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(0.5) +
                   std::exp(-1.0) + std::exp(3.0);
  EXPECT_NEAR(ExactLogSoftmax(s, 1), 2.0 - std::log(z), 1e-14);
}

TEST(ExactLogSoftmaxTest, BoundedByLogReciprocalRank) {
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t m = 1 + rng.Index(50);
    std::vector<double> s(m);
    for (double& x : s) x = rng.Normal() * 4.0;
    const std::size_t k = rng.Index(m);
    std::size_t rank = 1;
    for (std::size_t i = 0; i < m; ++i) rank += s[i] > s[k];
    EXPECT_LE(ExactLogSoftmax(s, k), -std::log(static_cast<double>(rank)));
  }
}

TEST(MarginalTest, PointMass) {
  const std::vector<std::int32_t> stream(10, 2);
  const std::vector<double> ref = {0.0, 0.0, 1.0};
  const auto m = Marginal(stream, 3, ref);
  EXPECT_EQ(m.frequencies, (std::vector<double>{0.0, 0.0, 1.0}));
  EXPECT_EQ(m.total_variation, 0.0);
}

TEST(TotalVariationTest, Endpoints) {
  const std::vector<double> p = {0.2, 0.3, 0.5};
  EXPECT_EQ(TotalVariation(p, p), 0.0);
  const std::vector<double> a = {1.0, 0.0}, b = {0.0, 1.0};
  EXPECT_EQ(TotalVariation(a, b), 1.0);
}

TEST(ExactTest, BundlesConsistentValues) {
  const std::vector<double> r = {0.3, -0.2, 1.1}, q = {0.0, 0.5, -0.5};
  const auto e = Exact(r, q);
  EXPECT_NEAR(std::accumulate(e.ranker_softmax.begin(),
                              e.ranker_softmax.end(), 0.0),
              1.0, 1e-9);
  EXPECT_NEAR(std::accumulate(e.retriever_softmax.begin(),
                              e.retriever_softmax.end(), 0.0),
              1.0, 1e-9);
  EXPECT_EQ(e.kl, ExactKl(r, q));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(std::exp(e.ranker_log_softmax[i]), e.ranker_softmax[i], 1e-15);
  }
}

}  // namespace
}  // namespace cotrain::oracle
