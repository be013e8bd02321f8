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

#include "cotrain/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "cotrain/errors.h"
#include "cotrain/numeric.h"
#include "cotrain/rng.h"

namespace cotrain {

InteractionDataset::InteractionDataset(
    std::vector<std::vector<ItemId>> sequences, std::int32_t num_items,
    std::size_t max_seq_len, std::vector<std::string> user_names,
    std::vector<std::string> item_names)
    : sequences_(std::move(sequences)),
      num_items_(num_items),
      max_seq_len_(max_seq_len),
      popularity_(static_cast<std::size_t>(num_items), 0),
      user_names_(std::move(user_names)),
      item_names_(std::move(item_names)) {
  if (max_seq_len_ == 0) throw ConfigError("max_seq_len must be positive");
  for (const auto& seq : sequences_) {
    for (ItemId i : seq) {
      if (i < 0 || i >= num_items_) {
        throw DataError("item index " + std::to_string(i) +
                        " out of range for catalog of " +
                        std::to_string(num_items_));
      }
      ++popularity_[i];
    }
  }
}

std::size_t InteractionDataset::num_interactions() const {
  std::size_t total = 0;
  for (const auto& seq : sequences_) total += seq.size();
  return total;
}

Context InteractionDataset::MakeContext(UserId u,
                                        std::size_t prefix_len) const {
  const auto& seq = sequences_[u];
  const std::size_t begin =
      prefix_len > max_seq_len_ ? prefix_len - max_seq_len_ : 0;
  return Context{u, std::vector<ItemId>(seq.begin() + begin,
                                        seq.begin() + prefix_len)};
}

std::vector<Example> InteractionDataset::TrainingPairs() const {
  std::vector<Example> pairs;
  for (UserId u = 0; u < num_users(); ++u) {
    const auto& seq = sequences_[u];
    for (std::size_t k = 1; k + 2 <= seq.size(); ++k) {
      pairs.push_back(Example{MakeContext(u, k), seq[k]});
    }
  }
  return pairs;
}

std::vector<Example> InteractionDataset::TestCases() const {
  std::vector<Example> cases;
  cases.reserve(sequences_.size());
  for (UserId u = 0; u < num_users(); ++u) {
    const auto& seq = sequences_[u];
    if (seq.size() < 2) continue;
    cases.push_back(Example{MakeContext(u, seq.size() - 1), seq.back()});
  }
  return cases;
}

std::vector<ItemId> InteractionDataset::InteractedItems(UserId u) const {
  const auto& seq = sequences_[u];
  std::vector<ItemId> items(seq.begin(), seq.end() - (seq.empty() ? 0 : 1));
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::vector<RawInteraction> ParseInteractions(std::istream& in) {
  std::vector<RawInteraction> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_no, "empty user or item id");
    }
    std::int64_t ts = 0;
    const auto ts_field = fields[2];
    const auto [ptr, ec] =
        std::from_chars(ts_field.data(), ts_field.data() + ts_field.size(), ts);
    if (ec != std::errc() || ptr != ts_field.data() + ts_field.size()) {
      throw ParseError(line_no, "timestamp is not an integer: '" +
                                    std::string(ts_field) + "'");
    }
    rows.push_back(
        RawInteraction{std::string(fields[0]), std::string(fields[1]), ts});
  }
  return rows;
}

std::vector<RawInteraction> FilterToFixedPoint(
    std::vector<RawInteraction> rows, std::size_t min_interactions) {
  while (true) {
    std::unordered_map<std::string, std::size_t> user_count;
    std::unordered_map<std::string, std::size_t> item_count;
    for (const auto& r : rows) {
      ++user_count[r.user_id];
      ++item_count[r.item_id];
    }
    std::vector<RawInteraction> kept;
    kept.reserve(rows.size());
    for (auto& r : rows) {
      if (user_count[r.user_id] >= min_interactions &&
          item_count[r.item_id] >= min_interactions) {
        kept.push_back(std::move(r));
      }
    }
    if (kept.size() == rows.size()) return kept;
    rows = std::move(kept);
  }
}

InteractionDataset BuildDataset(std::vector<RawInteraction> rows,
                                std::size_t min_interactions,
                                std::size_t max_seq_len) {
  rows = FilterToFixedPoint(std::move(rows), min_interactions);
  if (rows.empty()) {
    throw DataError("no interactions left after filtering users and items "
                    "with fewer than " +
                    std::to_string(min_interactions) + " interactions");
  }
  std::unordered_map<std::string, UserId> user_index;
  std::unordered_map<std::string, ItemId> item_index;
  std::vector<std::string> user_names;
  std::vector<std::string> item_names;
  std::vector<std::vector<std::pair<std::int64_t, ItemId>>> timed;
  for (const auto& r : rows) {
    auto [uit, new_user] =
        user_index.try_emplace(r.user_id, static_cast<UserId>(user_names.size()));
    if (new_user) {
      user_names.push_back(r.user_id);
      timed.emplace_back();
    }
    auto [iit, new_item] =
        item_index.try_emplace(r.item_id, static_cast<ItemId>(item_names.size()));
    if (new_item) item_names.push_back(r.item_id);
    timed[uit->second].emplace_back(r.timestamp, iit->second);
  }
  std::vector<std::vector<ItemId>> sequences(timed.size());
  for (std::size_t u = 0; u < timed.size(); ++u) {
    std::stable_sort(
        timed[u].begin(), timed[u].end(),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    sequences[u].reserve(timed[u].size());
    for (const auto& [ts, item] : timed[u]) sequences[u].push_back(item);
  }
  const auto num_items = static_cast<std::int32_t>(item_names.size());
  return InteractionDataset(std::move(sequences), num_items, max_seq_len, std::move(user_names),
                            std::move(item_names));
}

InteractionDataset Ingest(const std::filesystem::path& path,
                          std::size_t min_interactions,
                          std::size_t max_seq_len) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return BuildDataset(ParseInteractions(in), min_interactions, max_seq_len);
}

void WriteInteractions(const InteractionDataset& ds, std::ostream& out) {
  for (UserId u = 0; u < ds.num_users(); ++u) {
    const std::string user = u < static_cast<UserId>(ds.user_names().size())
                                 ? ds.user_names()[u]
                                 : "u" + std::to_string(u);
    const auto seq = ds.sequence(u);
    for (std::size_t t = 0; t < seq.size(); ++t) {
      const ItemId i = seq[t];
      const std::string item =
          i < static_cast<ItemId>(ds.item_names().size())
              ? ds.item_names()[i]
              : "i" + std::to_string(i);
      out << user << '\t' << item << '\t' << t << '\n';
    }
  }
}

std::vector<RawInteraction> GenerateSyntheticInteractions(
    const SyntheticConfig& config) {
  if (config.num_users < 1 || config.num_items < 2 || config.latent_dim < 1 ||
      config.min_length < 1 || config.max_length < config.min_length ||
      config.max_length > config.num_items) {
    throw ConfigError("invalid synthetic dataset configuration");
  }
  Rng rng(config.seed);
  const std::size_t k = static_cast<std::size_t>(config.latent_dim);
  const std::size_t m = static_cast<std::size_t>(config.num_items);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  std::vector<double> items(m * k);
  for (double& v : items) v = rng.Normal() * scale;
  std::vector<double> bias(m);
  for (double& b : bias) b = rng.Normal() * config.item_bias_std;

  std::vector<RawInteraction> rows;
  std::vector<double> user(k), intent(k), logits(m), cdf(m);
  std::vector<char> seen(m);
  for (std::int32_t u = 0; u < config.num_users; ++u) {
    for (double& v : user) v = rng.Normal() * scale;
    const auto length = config.min_length +
                        static_cast<std::int32_t>(rng.Index(
                            config.max_length - config.min_length + 1));
    std::fill(seen.begin(), seen.end(), 0);
    std::int64_t last = -1;
    const std::string user_name = "u" + std::to_string(u);
    for (std::int32_t t = 0; t < length; ++t) {
      intent = user;
      if (last >= 0) {
        for (std::size_t d = 0; d < k; ++d) {
          intent[d] += config.recency_weight * items[last * k + d];
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        double dot = 0.0;
        for (std::size_t d = 0; d < k; ++d) dot += intent[d] * items[i * k + d];
        logits[i] = seen[i] ? -std::numeric_limits<double>::infinity()
                            : config.sharpness * dot + bias[i];
      }
      const double lse = LogSumExp(logits);
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        acc += std::exp(logits[i] - lse);
        cdf[i] = acc;
      }
      const double r = rng.Uniform() * acc;
      auto pick = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
      if (pick >= m) {
        pick = m - 1;
        while (seen[pick]) --pick;
      }
      seen[pick] = 1;
      last = static_cast<std::int64_t>(pick);
      rows.push_back(
          RawInteraction{user_name, "i" + std::to_string(pick), t});
    }
  }
  return rows;
}

InteractionDataset Synthesize(const SyntheticConfig& config,
                              std::size_t min_interactions,
                              std::size_t max_seq_len) {
  return BuildDataset(GenerateSyntheticInteractions(config), min_interactions,
                      max_seq_len);
}

}  // namespace cotrain
