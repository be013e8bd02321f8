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

// Interaction logs: ingestion, frequency filtering, chronological
// leave-last-out splitting, and a latent-factor generator for synthetic data.

#ifndef COTRAIN_DATASET_H_
#define COTRAIN_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cotrain {

using ItemId = std::int32_t;
using UserId = std::int32_t;

inline constexpr std::size_t kDefaultMaxSeqLen = 20;
inline constexpr std::size_t kDefaultMinInteractions = 5;

struct RawInteraction {
  std::string user_id;
  std::string item_id;
  std::int64_t timestamp = 0;
};

// Everything a scorer sees besides the item: the user and the most recent
// part of the history prefix.
struct Context {
  UserId user = 0;
  std::vector<ItemId> history;
};

// A (context, item) pair; the item is the training positive or the held-out
// test target.
struct Example {
  Context context;
  ItemId item = 0;
};

class InteractionDataset {
 public:
  InteractionDataset() = default;

  // Sequences must already be chronological and use dense item indices.
  InteractionDataset(std::vector<std::vector<ItemId>> sequences,
                     std::int32_t num_items,
                     std::size_t max_seq_len = kDefaultMaxSeqLen,
                     std::vector<std::string> user_names = {},
                     std::vector<std::string> item_names = {});

  std::int32_t num_users() const {
    return static_cast<std::int32_t>(sequences_.size());
  }
  std::int32_t num_items() const { return num_items_; }
  std::size_t max_seq_len() const { return max_seq_len_; }
  std::size_t num_interactions() const;

  std::span<const ItemId> sequence(UserId u) const { return sequences_[u]; }
  const std::vector<std::vector<ItemId>>& sequences() const {
    return sequences_;
  }
  std::span<const std::int64_t> popularity() const { return popularity_; }
  const std::vector<std::string>& user_names() const { return user_names_; }
  const std::vector<std::string>& item_names() const { return item_names_; }

  // Prefixes of length 1..n-2, each paired with the next item. The final item
  // of a sequence is never a training target.
  std::vector<Example> TrainingPairs() const;

  // One case per user with at least two interactions: the first n-1 items
  // predict the n-th.
  std::vector<Example> TestCases() const;

  // Sorted, deduplicated items of the training part (first n-1 items) of a
  // user's sequence.
  std::vector<ItemId> InteractedItems(UserId u) const;

  // Keeps the most recent max_seq_len items of sequence(u)[0, prefix_len).
  Context MakeContext(UserId u, std::size_t prefix_len) const;

 private:
  std::vector<std::vector<ItemId>> sequences_;
  std::int32_t num_items_ = 0;
  std::size_t max_seq_len_ = kDefaultMaxSeqLen;
  std::vector<std::int64_t> popularity_;
  std::vector<std::string> user_names_;
  std::vector<std::string> item_names_;
};

// Parses `user<TAB>item<TAB>timestamp` lines; '#' lines and blank lines are
// skipped. Throws ParseError with the 1-based line number.
std::vector<RawInteraction> ParseInteractions(std::istream& in);

// Drops users and items with fewer than min_interactions rows, repeating until
// nothing changes. Row order is preserved.
std::vector<RawInteraction> FilterToFixedPoint(
    std::vector<RawInteraction> rows, std::size_t min_interactions);

// Filter, stable-sort each user by timestamp, assign dense indices by first
// appearance. Throws DataError if nothing survives.
InteractionDataset BuildDataset(std::vector<RawInteraction> rows,
                                std::size_t min_interactions,
                                std::size_t max_seq_len = kDefaultMaxSeqLen);

InteractionDataset Ingest(const std::filesystem::path& path,
                          std::size_t min_interactions,
                          std::size_t max_seq_len = kDefaultMaxSeqLen);

// Writes the dataset back out in the ingest format, timestamps being
// positions within each sequence.
void WriteInteractions(const InteractionDataset& ds, std::ostream& out);

struct SyntheticConfig {
  std::int32_t num_users = 2000;
  std::int32_t num_items = 500;
  std::int32_t latent_dim = 16;
  std::int32_t min_length = 8;
  std::int32_t max_length = 16;
  // Inverse temperature of the generating preference softmax.
  double sharpness = 4.0;
  // Weight of the most recent item's latent vector in the next-step intent.
  double recency_weight = 1.0;
  // Std of a per-item popularity offset added to every logit.
  double item_bias_std = 0.0;
  std::uint64_t seed = 7;
};

// Users and items get Gaussian latent vectors; each step draws an unseen item
// from softmax(sharpness * <intent, item> + bias_item), where intent mixes the
// user vector with the last item's vector. Output goes through the same filtering
// and indexing as ingested logs.
std::vector<RawInteraction> GenerateSyntheticInteractions(
    const SyntheticConfig& config);

InteractionDataset Synthesize(const SyntheticConfig& config,
                              std::size_t min_interactions,
                              std::size_t max_seq_len = kDefaultMaxSeqLen);

}  // namespace cotrain

#endif  // COTRAIN_DATASET_H_
