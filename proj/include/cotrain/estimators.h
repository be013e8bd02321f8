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

// Sampled objectives. All take proposal-corrected logits
//
//   corrected(i) = score(i) - log q(i)
//
// where q is the (possibly unnormalized) proposal the items were drawn from.
// Natural logarithms throughout. Proposal log-probabilities are constants:
// no gradient flows into the sampler.
//
// Sign conventions follow the objectives themselves: the sampled log-softmax
// is to be maximized (it is <= 0), the KL divergence minimized (it is >= 0).

#ifndef COTRAIN_ESTIMATORS_H_
#define COTRAIN_ESTIMATORS_H_

#include <optional>
#include <span>
#include <vector>

#include "cotrain/dataset.h"
#include "cotrain/models.h"

namespace cotrain {

// Rounding guard: KL values in [-kKlClamp, 0) are reported as 0.
inline constexpr double kKlClamp = 1e-12;

struct CorrectedLogits {
  std::vector<double> raw;
  std::vector<double> log_proposal;
  std::vector<double> corrected;

  // log_proposal may be empty, meaning no correction.
  static CorrectedLogits Make(std::vector<double> raw,
                              std::vector<double> log_proposal);
};

// positive - logsumexp({positive} u samples). The positive occupies its own
// slot even if it also appears among the samples.
double SampledLogSoftmax(double positive_corrected,
                         std::span<const double> sample_corrected);

// Softmax weights over [positive, samples...] of the corrected logits.
std::vector<double> SampledSoftmaxWeights(
    double positive_corrected, std::span<const double> sample_corrected);

struct ObjectiveAndGrad {
  double value = 0.0;
  Gradient gradient;
};

// Sampled log-softmax of `positive` against `items` under `scorer`, with its
// gradient
//
//   grad R(k) - sum_{i in S u {k}} w(i) grad R(i).
//
// log_q / positive_log_q are the proposal log-probabilities; empty log_q and
// a missing positive_log_q mean an uncorrected softmax over the set.
ObjectiveAndGrad SampledLogSoftmaxWithGrad(const BoundScorer& scorer,
                                           ItemId positive,
                                           std::optional<double> positive_log_q,
                                           std::span<const ItemId> items,
                                           std::span<const double> log_q);

Gradient SampledLogSoftmaxGrad(const BoundScorer& scorer, ItemId positive,
                               std::optional<double> positive_log_q,
                               std::span<const ItemId> items,
                               std::span<const double> log_q);

// KL(P_S || Q_S) with P_S = softmax(ranker_corrected) and
// Q_S = softmax(retriever_corrected) over the same sample multiset.
// Throws std::invalid_argument on a length mismatch or empty input.
double SampledKl(std::span<const double> ranker_corrected,
                 std::span<const double> retriever_corrected);

// Same quantity in the form E_{P_S}[delta] - log E_{Q_S}[exp(delta)], with
// delta = ranker_raw - retriever_raw. Agrees with SampledKl up to rounding.
double SampledKlDeltaForm(std::span<const double> ranker_corrected,
                          std::span<const double> retriever_corrected);

// Sampled KL and its gradient with respect to the retriever only:
//   sum_j (Q_S(j) - P_S(j)) grad M(j).
// The ranker scores are taken as constants. Empty log_q means no correction.
ObjectiveAndGrad SampledKlWithRetrieverGrad(
    const BoundScorer& retriever, std::span<const ItemId> items,
    std::span<const double> log_q, std::span<const double> ranker_scores);

// log L - H(softmax(delta)), in [0, log L].
double EntropyFormKl(std::span<const double> delta);

// -log sigmoid(pos) - sum_j log(1 - sigmoid(neg_j)), via softplus.
double BceLoss(double positive_score, std::span<const double> negative_scores);

// Sampled log-softmax with the sample set equal to the whole catalog, each
// item once, corrected by `log_proposal` (one entry per item). The positive is
// counted twice (its own slot plus its catalog entry), which biases the
// result below the exact log-softmax: with equal scores and uniform proposal
// over m items it gives -log(m + 1) instead of -log m.
double FullCatalogSampledLogSoftmax(std::span<const double> scores,
                                    ItemId positive,
                                    std::span<const double> log_proposal);

}  // namespace cotrain

#endif  // COTRAIN_ESTIMATORS_H_
