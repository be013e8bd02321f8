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

// Scorers with analytic gradients.
//
// Both models encode a context as the mean of its history item embeddings.
//
//   retriever:  s(i, c) = <u_c, e_i>
//   ranker:     x = [u_c; e_i; u_c * e_i]          (3d)
//               h = sigmoid(W1 x + b1)             (hidden)
//               s(i, c) = <w2, h> + b2
//
// The ranker is a joint (context, item) interaction scorer standing in for a
// deep attention ranker; it cannot be written as an inner product of separate
// context and item towers. The two models never share parameters.

#ifndef COTRAIN_MODELS_H_
#define COTRAIN_MODELS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "cotrain/dataset.h"

namespace cotrain {

enum class ModelKind : std::uint32_t { kRetriever = 1, kRanker = 2 };

const char* ModelKindName(ModelKind kind);

// Flat parameter vector, row-major:
//   [item embeddings: num_items x dim]
//   ranker only: [W1: hidden x 3*dim][b1: hidden][w2: hidden][b2: 1]
class ScorerParams {
 public:
  ScorerParams() = default;

  // Entries i.i.d. uniform in [-1/sqrt(dim), 1/sqrt(dim)]. hidden == 0 picks
  // 2 * dim for the ranker and is ignored for the retriever.
  static ScorerParams Initialize(ModelKind kind, std::int32_t num_items,
                                 std::int32_t dim, std::uint64_t seed,
                                 std::int32_t hidden = 0);

  // All-zero parameters of the given shape.
  static ScorerParams Zeros(ModelKind kind, std::int32_t num_items,
                            std::int32_t dim, std::int32_t hidden = 0);

  ModelKind kind() const { return kind_; }
  std::int32_t num_items() const { return num_items_; }
  std::int32_t dim() const { return dim_; }
  std::int32_t hidden() const { return hidden_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  std::span<const double> embedding(ItemId i) const {
    return std::span<const double>(values_).subspan(
        static_cast<std::size_t>(i) * dim_, dim_);
  }
  std::span<double> embedding(ItemId i) {
    return std::span<double>(values_).subspan(
        static_cast<std::size_t>(i) * dim_, dim_);
  }

  // Start and length of the ranker's MLP block in values(); length 0 for the
  // retriever.
  std::size_t dense_offset() const {
    return static_cast<std::size_t>(num_items_) * dim_;
  }
  std::size_t dense_size() const { return values_.size() - dense_offset(); }
  std::span<const double> dense() const {
    return values().subspan(dense_offset());
  }
  std::span<double> dense() { return values().subspan(dense_offset()); }

  bool operator==(const ScorerParams&) const = default;

 private:
  ScorerParams(ModelKind kind, std::int32_t num_items, std::int32_t dim,
               std::int32_t hidden, std::uint64_t seed);

  friend ScorerParams LoadCheckpoint(std::istream& in);

  ModelKind kind_ = ModelKind::kRetriever;
  std::int32_t num_items_ = 0;
  std::int32_t dim_ = 0;
  std::int32_t hidden_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> values_;
};

// Sparse gradient: embedding rows keyed by item, plus the whole MLP block
// when it was touched.
class Gradient {
 public:
  Gradient() = default;
  explicit Gradient(std::int32_t dim) : dim_(dim) {}

  void AddRow(ItemId item, std::span<const double> g, double scale = 1.0);
  // Grows the dense block to g.size() on first use.
  void AddDense(std::span<const double> g, double scale = 1.0);
  void Add(const Gradient& other, double scale = 1.0);
  void Scale(double s);

  bool empty() const { return rows_.empty() && dense_.empty(); }
  std::int32_t dim() const { return dim_; }
  const std::map<ItemId, std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& dense() const { return dense_; }

  // Partial for the flat coordinate `index` of params laid out like `shape`;
  // zero if untouched.
  double At(const ScorerParams& shape, std::size_t index) const;

  // Number of touched coordinates.
  std::size_t support_size() const;

  // Zero-initialized on first access.
  std::span<double> MutableRow(ItemId item);
  std::span<double> MutableDense(std::size_t size);

 private:
  std::int32_t dim_ = 0;
  std::map<ItemId, std::vector<double>> rows_;
  std::vector<double> dense_;
};

struct ScoreAndGrad {
  double score = 0.0;
  Gradient gradient;
};

// Mean of the history embeddings.
std::vector<double> ContextEmbedding(const ScorerParams& params,
                                     const Context& ctx);

double RetrieverScore(const ScorerParams& params, ItemId item,
                      const Context& ctx);
double RankerScore(const ScorerParams& params, ItemId item,
                   const Context& ctx);

// Dispatches on params.kind().
double Score(const ScorerParams& params, ItemId item, const Context& ctx);

ScoreAndGrad ScoreWithGrad(const ScorerParams& params, ItemId item,
                           const Context& ctx);

// Scores of all catalog items, equal pointwise to Score().
std::vector<double> ScoreAll(const ScorerParams& params, const Context& ctx);

// A scorer with its context embedding computed once. Holds references; the
// params and context must outlive it.
class BoundScorer {
 public:
  BoundScorer(const ScorerParams& params, const Context& ctx);

  double Score(ItemId item) const;
  std::vector<double> ScoreAll() const;

  // grad += weight * d score(item) / d params.
  void AccumulateGrad(ItemId item, double weight, Gradient& grad) const;
  // Same as one AccumulateGrad per (item, weight), sharing the context work.
  void AccumulateGrads(std::span<const ItemId> items,
                       std::span<const double> weights, Gradient& grad) const;

  const ScorerParams& params() const { return *params_; }
  const Context& context() const { return *ctx_; }

 private:
  // Forward pass of the ranker MLP; fills hidden activations if non-null.
  double RankerForward(std::span<const double> item_emb, double* h) const;

  const ScorerParams* params_;
  const Context* ctx_;
  std::vector<double> context_embedding_;
  // Ranker only: first-layer terms fixed by the context.
  std::vector<double> context_pre_;   // hidden
  std::vector<double> item_weights_;  // dim x hidden
};

// p -= lr * (g + weight_decay * p) over the coordinates g touches. A zero
// learning rate leaves params unchanged.
void ApplySgd(ScorerParams& params, const Gradient& grad, double learning_rate,
              double weight_decay);

// Checkpoint layout (little-endian):
//   char[8]  magic "COTRCKPT"
//   u32      format version (1)
//   u32      model kind (1 retriever, 2 ranker)
//   i32      num_items
//   i32      dim
//   i32      hidden
//   u32      reserved (0)
//   u64      init seed
//   u64      value count
//   f64[]    values, flat layout as in ScorerParams
void SaveCheckpoint(const ScorerParams& params, std::ostream& out);
ScorerParams LoadCheckpoint(std::istream& in);
void SaveCheckpoint(const ScorerParams& params,
                    const std::filesystem::path& path);
ScorerParams LoadCheckpoint(const std::filesystem::path& path);

}  // namespace cotrain

#endif  // COTRAIN_MODELS_H_
