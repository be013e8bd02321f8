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

// Exact full-catalog references for the sampled estimators and the sampler.
// Test and acceptance use only. Nothing here calls into numeric.h,
// estimators.h or sampler.h; keep it that way so each check has two
// independent routes. Catalogs are limited to kMaxOracleItems.

#ifndef COTRAIN_ORACLE_H_
#define COTRAIN_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace cotrain::oracle {

inline constexpr std::size_t kMaxOracleItems = 10000;

// softmax(scores / temperature) over the whole catalog.
std::vector<double> ExactSoftmax(std::span<const double> scores,
                                 double temperature = 1.0);

// KL(softmax(p_scores) || softmax(q_scores)).
double ExactKl(std::span<const double> p_scores,
               std::span<const double> q_scores);

// scores[positive] - log sum_i exp(scores[i]).
double ExactLogSoftmax(std::span<const double> scores, std::size_t positive);

struct EmpiricalMarginal {
  std::vector<double> frequencies;
  double total_variation = 0.0;
};

// Normalized counts of `stream` over [0, num_items) and 0.5 * L1 distance to
// `reference`.
EmpiricalMarginal Marginal(std::span<const std::int32_t> stream,
                           std::size_t num_items,
                           std::span<const double> reference);

double TotalVariation(std::span<const double> p, std::span<const double> q);

struct ExactDistributions {
  std::vector<double> retriever_softmax;
  std::vector<double> ranker_softmax;
  double kl = 0.0;  // KL(ranker || retriever)
  std::vector<double> ranker_log_softmax;
};

ExactDistributions Exact(std::span<const double> ranker_scores,
                         std::span<const double> retriever_scores);

}  // namespace cotrain::oracle

#endif  // COTRAIN_ORACLE_H_
