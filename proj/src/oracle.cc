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

#include <cmath>
#include <stdexcept>

namespace cotrain::oracle {
namespace {

void CheckSize(std::size_t n) {
  if (n == 0) throw std::invalid_argument("oracle needs at least one item");
  if (n > kMaxOracleItems) {
    throw std::invalid_argument("oracle catalogs are limited to 10^4 items");
  }
}

// Plain two-pass normalizer, deliberately written out here.
double LogPartition(std::span<const double> scores, double temperature) {
  double top = scores[0] / temperature;
  for (double s : scores) top = std::fmax(top, s / temperature);
  long double z = 0.0L;
  for (double s : scores) z += std::exp(static_cast<long double>(s / temperature - top));
  return top + static_cast<double>(std::log(z));
}

}  // namespace

std::vector<double> ExactSoftmax(std::span<const double> scores,
                                 double temperature) {
  CheckSize(scores.size());
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature <= 0");
  const double log_z = LogPartition(scores, temperature);
  std::vector<double> p(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp(scores[i] / temperature - log_z);
  }
  return p;
}

double ExactKl(std::span<const double> p_scores,
               std::span<const double> q_scores) {
  CheckSize(p_scores.size());
  if (p_scores.size() != q_scores.size()) {
    throw std::invalid_argument("ExactKl: lengths differ");
  }
  const double log_zp = LogPartition(p_scores, 1.0);
  const double log_zq = LogPartition(q_scores, 1.0);
  long double kl = 0.0L;
  for (std::size_t i = 0; i < p_scores.size(); ++i) {
    const double log_p = p_scores[i] - log_zp;
    const double log_q = q_scores[i] - log_zq;
    kl += std::exp(static_cast<long double>(log_p)) * (log_p - log_q);
  }
  return static_cast<double>(kl);
}

double ExactLogSoftmax(std::span<const double> scores, std::size_t positive) {
  CheckSize(scores.size());
  if (positive >= scores.size()) {
    throw std::invalid_argument("ExactLogSoftmax: positive out of range");
  }
  return scores[positive] - LogPartition(scores, 1.0);
}

double TotalVariation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("TotalVariation: lengths differ");
  }
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::fabs(p[i] - q[i]);
  return 0.5 * l1;
}

EmpiricalMarginal Marginal(std::span<const std::int32_t> stream,
                           std::size_t num_items,
                           std::span<const double> reference) {
  CheckSize(num_items);
  if (stream.empty()) throw std::invalid_argument("empty sample stream");
  EmpiricalMarginal out;
  out.frequencies.assign(num_items, 0.0);
  for (std::int32_t i : stream) {
    if (i < 0 || static_cast<std::size_t>(i) >= num_items) {
      throw std::invalid_argument("sample outside the catalog");
    }
    out.frequencies[i] += 1.0;
  }
  for (double& f : out.frequencies) f /= static_cast<double>(stream.size());
  if (!reference.empty()) {
    out.total_variation = TotalVariation(out.frequencies, reference);
  }
  return out;
}

ExactDistributions Exact(std::span<const double> ranker_scores,
                         std::span<const double> retriever_scores) {
  ExactDistributions out;
  out.retriever_softmax = ExactSoftmax(retriever_scores);
  out.ranker_softmax = ExactSoftmax(ranker_scores);
  out.kl = ExactKl(ranker_scores, retriever_scores);
  out.ranker_log_softmax.resize(ranker_scores.size());
  for (std::size_t i = 0; i < ranker_scores.size(); ++i) {
    out.ranker_log_softmax[i] = ExactLogSoftmax(ranker_scores, i);
  }
  return out;
}

}  // namespace cotrain::oracle
