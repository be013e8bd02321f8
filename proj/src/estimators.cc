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

#include "cotrain/estimators.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cotrain/numeric.h"

namespace cotrain {

CorrectedLogits CorrectedLogits::Make(std::vector<double> raw,
                                      std::vector<double> log_proposal) {
  if (!log_proposal.empty() && log_proposal.size() != raw.size()) {
    throw std::invalid_argument("raw and log_proposal lengths differ");
  }
  CorrectedLogits out;
  out.corrected = raw;
  for (std::size_t i = 0; i < log_proposal.size(); ++i) {
    out.corrected[i] -= log_proposal[i];
  }
  out.raw = std::move(raw);
  out.log_proposal = std::move(log_proposal);
  return out;
}

namespace {

std::vector<double> WithPositive(double positive,
                                 std::span<const double> samples) {
  std::vector<double> all;
  all.reserve(samples.size() + 1);
  all.push_back(positive);
  all.insert(all.end(), samples.begin(), samples.end());
  return all;
}

void CheckSameLength(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("sampled KL inputs differ in length (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw std::invalid_argument("sampled KL needs L >= 1");
}

double ClampKl(double kl) { return (kl < 0.0 && kl >= -kKlClamp) ? 0.0 : kl; }

}  // namespace

double SampledLogSoftmax(double positive_corrected,
                         std::span<const double> sample_corrected) {
  const auto all = WithPositive(positive_corrected, sample_corrected);
  const double value = positive_corrected - LogSumExp(all);
  return value > 0.0 ? 0.0 : value;  // NaN passes through
}

std::vector<double> SampledSoftmaxWeights(
    double positive_corrected, std::span<const double> sample_corrected) {
  return Softmax(WithPositive(positive_corrected, sample_corrected));
}

ObjectiveAndGrad SampledLogSoftmaxWithGrad(const BoundScorer& scorer,
                                           ItemId positive,
                                           std::optional<double> positive_log_q,
                                           std::span<const ItemId> items,
                                           std::span<const double> log_q) {
  if (!log_q.empty() && log_q.size() != items.size()) {
    throw std::invalid_argument("items and log_q lengths differ");
  }
  const double pos = scorer.Score(positive) - positive_log_q.value_or(0.0);
  std::vector<double> samples(items.size());
  for (std::size_t j = 0; j < items.size(); ++j) {
    samples[j] = scorer.Score(items[j]) - (log_q.empty() ? 0.0 : log_q[j]);
  }
  ObjectiveAndGrad out;
  out.value = SampledLogSoftmax(pos, samples);
  out.gradient = Gradient(scorer.params().dim());
  const auto w = SampledSoftmaxWeights(pos, samples);
  std::vector<ItemId> all_items;
  all_items.reserve(items.size() + 1);
  all_items.push_back(positive);
  all_items.insert(all_items.end(), items.begin(), items.end());
  std::vector<double> coef(w.size());
  coef[0] = 1.0 - w[0];
  for (std::size_t j = 1; j < w.size(); ++j) coef[j] = -w[j];
  scorer.AccumulateGrads(all_items, coef, out.gradient);
  return out;
}

Gradient SampledLogSoftmaxGrad(const BoundScorer& scorer, ItemId positive,
                               std::optional<double> positive_log_q,
                               std::span<const ItemId> items,
                               std::span<const double> log_q) {
  return SampledLogSoftmaxWithGrad(scorer, positive, positive_log_q, items,
                                   log_q)
      .gradient;
}

double SampledKl(std::span<const double> ranker_corrected,
                 std::span<const double> retriever_corrected) {
  CheckSameLength(ranker_corrected, retriever_corrected);
  const auto log_p = LogSoftmax(ranker_corrected);
  const auto log_q = LogSoftmax(retriever_corrected);
  double kl = 0.0;
  for (std::size_t j = 0; j < log_p.size(); ++j) {
    kl += std::exp(log_p[j]) * (log_p[j] - log_q[j]);
  }
  return ClampKl(kl);
}

double SampledKlDeltaForm(std::span<const double> ranker_corrected,
                          std::span<const double> retriever_corrected) {
  CheckSameLength(ranker_corrected, retriever_corrected);
  // The proposal correction cancels in the difference.
  const std::size_t n = ranker_corrected.size();
  std::vector<double> delta(n);
  for (std::size_t j = 0; j < n; ++j) {
    delta[j] = ranker_corrected[j] - retriever_corrected[j];
  }
  // Both terms are invariant to a common offset in delta; centering keeps
  // softmax rounding from being scaled up by a large delta.
  const double center = *std::max_element(delta.begin(), delta.end());
  for (double& d : delta) d -= center;
  const auto p = Softmax(ranker_corrected);
  const auto log_q = LogSoftmax(retriever_corrected);
  double expected_delta = 0.0;
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    expected_delta += p[j] * delta[j];
    terms[j] = log_q[j] + delta[j];
  }
  return ClampKl(expected_delta - LogSumExp(terms));
}

ObjectiveAndGrad SampledKlWithRetrieverGrad(
    const BoundScorer& retriever, std::span<const ItemId> items,
    std::span<const double> log_q, std::span<const double> ranker_scores) {
  if (ranker_scores.size() != items.size() ||
      (!log_q.empty() && log_q.size() != items.size())) {
    throw std::invalid_argument("sampled KL inputs differ in length");
  }
  const std::size_t n = items.size();
  std::vector<double> r(n), m(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double correction = log_q.empty() ? 0.0 : log_q[j];
    r[j] = ranker_scores[j] - correction;
    m[j] = retriever.Score(items[j]) - correction;
  }
  ObjectiveAndGrad out;
  out.value = SampledKl(r, m);
  out.gradient = Gradient(retriever.params().dim());
  const auto p = Softmax(r);
  const auto q = Softmax(m);
  std::vector<double> coef(n);
  for (std::size_t j = 0; j < n; ++j) coef[j] = q[j] - p[j];
  retriever.AccumulateGrads(items, coef, out.gradient);
  return out;
}

double EntropyFormKl(std::span<const double> delta) {
  if (delta.empty()) throw std::invalid_argument("entropy form needs L >= 1");
  const auto log_p = LogSoftmax(delta);
  double entropy = 0.0;
  for (double lp : log_p) {
    if (std::isfinite(lp)) entropy -= std::exp(lp) * lp;
  }
  const double log_l = std::log(static_cast<double>(delta.size()));
  return std::clamp(log_l - entropy, 0.0, log_l);
}

double BceLoss(double positive_score, std::span<const double> negative_scores) {
  // -log sigmoid(x) = softplus(-x); -log(1 - sigmoid(x)) = softplus(x).
  double loss = Softplus(-positive_score);
  for (double s : negative_scores) loss += Softplus(s);
  return loss;
}

double FullCatalogSampledLogSoftmax(std::span<const double> scores,
                                    ItemId positive,
                                    std::span<const double> log_proposal) {
  if (log_proposal.size() != scores.size()) {
    throw std::invalid_argument("scores and log_proposal lengths differ");
  }
  std::vector<double> corrected(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    corrected[i] = scores[i] - log_proposal[i];
  }
  return SampledLogSoftmax(corrected[positive], corrected);
}

}  // namespace cotrain
