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

#include "cotrain/sampler.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "cotrain/numeric.h"

namespace cotrain {

const char* ProposalKindName(ProposalKind kind) {
  return kind == ProposalKind::kUniform ? "uniform" : "popularity";
}

ProposalKind ParseProposalKind(const std::string& name) {
  if (name == "uniform") return ProposalKind::kUniform;
  if (name == "popularity") return ProposalKind::kPopularity;
  throw ConfigError("unknown proposal '" + name +
                    "' (expected uniform or popularity)");
}

StaticProposal::StaticProposal(ProposalKind kind, std::vector<double> weights)
    : kind_(kind) {
  const std::size_t m = weights.size();
  if (m == 0) throw ConfigError("proposal over an empty catalog");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ConfigError("proposal weights must have a positive finite sum");
  }
  log_probs_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_probs_[i] = std::log(weights[i]) - std::log(total);
  }

  // Vose's alias method.
  alias_prob_.assign(m, 0.0);
  alias_.assign(m, 0);
  std::vector<double> scaled(m);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < m; ++i) {
    scaled[i] = weights[i] / total * static_cast<double>(m);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    alias_prob_[s] = scaled[s];
    alias_[s] = static_cast<ItemId>(l);
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) alias_prob_[i] = 1.0;
  for (std::size_t i : small) alias_prob_[i] = 1.0;
}

StaticProposal StaticProposal::Uniform(std::int32_t num_items) {
  if (num_items < 1) throw ConfigError("proposal over an empty catalog");
  return StaticProposal(ProposalKind::kUniform,
                        std::vector<double>(num_items, 1.0));
}

StaticProposal StaticProposal::Popularity(std::span<const std::int64_t> counts,
                                          double exponent) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw ConfigError("negative popularity count");
    w[i] = counts[i] == 0 ? 0.0
                          : std::pow(static_cast<double>(counts[i]), exponent);
  }
  return StaticProposal(ProposalKind::kPopularity, std::move(w));
}

ItemId StaticProposal::Draw(Rng& rng) const {
  const auto column =
      static_cast<std::size_t>(rng.Index(alias_prob_.size()));
  if (kind_ == ProposalKind::kUniform) return static_cast<ItemId>(column);
  return rng.Uniform() < alias_prob_[column] ? static_cast<ItemId>(column)
                                             : alias_[column];
}

std::vector<ItemId> DrawPool(const StaticProposal& proposal, std::size_t n,
                             Rng& rng) {
  std::vector<ItemId> pool(n);
  for (auto& item : pool) item = proposal.Draw(rng);
  return pool;
}

ResampleDistribution ResampleWeights(const CandidatePool& pool) {
  if (!(pool.temperature > 0.0)) {
    throw ConfigError("temperature must be positive");
  }
  const std::size_t n = pool.items.size();
  ResampleDistribution dist;
  dist.slot_log_prob.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = pool.retriever_scores[j];
    const double log_y = pool.static_log_y[j];
    if (!std::isfinite(s) || !std::isfinite(log_y)) {
      std::ostringstream msg;
      msg << "non-finite resampling input at pool slot " << j << " (item "
          << pool.items[j] << ", score " << s << ", log Y " << log_y << ")";
      throw NumericError(msg.str());
    }
    dist.slot_log_prob[j] = s / pool.temperature - log_y;
  }
  const double lse = LogSumExp(dist.slot_log_prob);
  dist.cumulative.resize(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    dist.slot_log_prob[j] -= lse;
    acc += std::exp(dist.slot_log_prob[j]);
    dist.cumulative[j] = acc;
  }
  return dist;
}

double ResampleDistribution::ItemLogProb(const CandidatePool& pool,
                                         ItemId item) const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pool.items.size(); ++j) {
    if (pool.items[j] == item) m = std::max(m, slot_log_prob[j]);
  }
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (std::size_t j = 0; j < pool.items.size(); ++j) {
    if (pool.items[j] == item) sum += std::exp(slot_log_prob[j] - m);
  }
  return m + std::log(sum);
}

std::vector<std::pair<ItemId, double>> DistinctItemLogProbs(
    const CandidatePool& pool, const ResampleDistribution& dist) {
  std::vector<ItemId> distinct = pool.items;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  std::vector<std::pair<ItemId, double>> out;
  out.reserve(distinct.size());
  for (ItemId i : distinct) out.emplace_back(i, dist.ItemLogProb(pool, i));
  return out;
}

SampleSet Resample(const CandidatePool& pool, const ResampleDistribution& dist,
                   std::size_t num_samples, Rng& rng) {
  SampleSet out;
  out.items.reserve(num_samples);
  out.log_q.reserve(num_samples);
  const double total = dist.cumulative.back();
  for (std::size_t s = 0; s < num_samples; ++s) {
    const double r = rng.Uniform() * total;
    auto slot = static_cast<std::size_t>(
        std::upper_bound(dist.cumulative.begin(), dist.cumulative.end(), r) -
        dist.cumulative.begin());
    slot = std::min(slot, pool.items.size() - 1);
    const ItemId item = pool.items[slot];
    out.items.push_back(item);
  }
  // Item-level log-probabilities; repeated items reuse the first lookup.
  for (std::size_t s = 0; s < out.items.size(); ++s) {
    const auto prev = std::find(out.items.begin(), out.items.begin() + s,
                                out.items[s]);
    out.log_q.push_back(prev != out.items.begin() + s
                            ? out.log_q[prev - out.items.begin()]
                            : dist.ItemLogProb(pool, out.items[s]));
  }
  return out;
}

SampleSet StaticSample(const StaticProposal& proposal,
                       std::optional<ItemId> positive, std::size_t num_samples,
                       Rng& rng) {
  SampleSet out;
  out.items = DrawPool(proposal, num_samples, rng);
  out.log_q.reserve(num_samples);
  for (ItemId i : out.items) out.log_q.push_back(proposal.log_prob(i));
  if (positive.has_value()) out.positive_log_q = proposal.log_prob(*positive);
  return out;
}

}  // namespace cotrain
