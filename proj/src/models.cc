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

#include "cotrain/models.h"

#include <algorithm>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "cotrain/errors.h"
#include "cotrain/numeric.h"
#include "cotrain/rng.h"

namespace cotrain {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

const char* ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kRetriever:
      return "retriever";
    case ModelKind::kRanker:
      return "ranker";
  }
  return "unknown";
}

namespace {

std::size_t DenseSizeFor(ModelKind kind, std::int32_t dim,
                         std::int32_t hidden) {
  if (kind == ModelKind::kRetriever) return 0;
  const auto h = static_cast<std::size_t>(hidden);
  return h * 3 * dim + h + h + 1;
}

}  // namespace

ScorerParams::ScorerParams(ModelKind kind, std::int32_t num_items,
                           std::int32_t dim, std::int32_t hidden,
                           std::uint64_t seed)
    : kind_(kind),
      num_items_(num_items),
      dim_(dim),
      hidden_(kind == ModelKind::kRanker ? (hidden > 0 ? hidden : 2 * dim)
                                         : 0),
      seed_(seed) {
  if (num_items < 1 || dim < 1) {
    throw ConfigError("scorer needs num_items >= 1 and dim >= 1");
  }
  values_.assign(static_cast<std::size_t>(num_items) * dim +
                     DenseSizeFor(kind, dim, hidden_),
                 0.0);
}

ScorerParams ScorerParams::Initialize(ModelKind kind, std::int32_t num_items,
                                      std::int32_t dim, std::uint64_t seed,
                                      std::int32_t hidden) {
  ScorerParams p(kind, num_items, dim, hidden, seed);
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& v : p.values_) v = rng.Uniform(-bound, bound);
  return p;
}

ScorerParams ScorerParams::Zeros(ModelKind kind, std::int32_t num_items,
                                 std::int32_t dim, std::int32_t hidden) {
  return ScorerParams(kind, num_items, dim, hidden, 0);
}

// ---------------------------------------------------------------- Gradient

std::span<double> Gradient::MutableRow(ItemId item) {
  auto [it, inserted] = rows_.try_emplace(item);
  if (inserted) it->second.assign(static_cast<std::size_t>(dim_), 0.0);
  return it->second;
}

std::span<double> Gradient::MutableDense(std::size_t size) {
  if (dense_.empty()) dense_.assign(size, 0.0);
  return dense_;
}

void Gradient::AddRow(ItemId item, std::span<const double> g, double scale) {
  if (dim_ == 0) dim_ = static_cast<std::int32_t>(g.size());
  auto row = MutableRow(item);
  for (std::size_t d = 0; d < row.size(); ++d) row[d] += scale * g[d];
}

void Gradient::AddDense(std::span<const double> g, double scale) {
  auto dense = MutableDense(g.size());
  for (std::size_t j = 0; j < dense.size(); ++j) dense[j] += scale * g[j];
}

void Gradient::Add(const Gradient& other, double scale) {
  if (dim_ == 0) dim_ = other.dim_;
  for (const auto& [item, g] : other.rows_) AddRow(item, g, scale);
  if (!other.dense_.empty()) AddDense(other.dense_, scale);
}

void Gradient::Scale(double s) {
  for (auto& [item, g] : rows_) {
    for (double& v : g) v *= s;
  }
  for (double& v : dense_) v *= s;
}

double Gradient::At(const ScorerParams& shape, std::size_t index) const {
  if (index >= shape.dense_offset()) {
    const std::size_t j = index - shape.dense_offset();
    return j < dense_.size() ? dense_[j] : 0.0;
  }
  const auto item = static_cast<ItemId>(index / shape.dim());
  const auto it = rows_.find(item);
  if (it == rows_.end()) return 0.0;
  return it->second[index % shape.dim()];
}

std::size_t Gradient::support_size() const {
  return rows_.size() * static_cast<std::size_t>(dim_) + dense_.size();
}

// ----------------------------------------------------------------- scoring

std::vector<double> ContextEmbedding(const ScorerParams& params,
                                     const Context& ctx) {
  std::vector<double> u(static_cast<std::size_t>(params.dim()), 0.0);
  if (ctx.history.empty()) return u;
  for (ItemId h : ctx.history) {
    const auto e = params.embedding(h);
    for (std::size_t d = 0; d < u.size(); ++d) u[d] += e[d];
  }
  const double inv = 1.0 / static_cast<double>(ctx.history.size());
  for (double& v : u) v *= inv;
  return u;
}

BoundScorer::BoundScorer(const ScorerParams& params, const Context& ctx)
    : params_(&params),
      ctx_(&ctx),
      context_embedding_(ContextEmbedding(params, ctx)) {
  if (params.kind() != ModelKind::kRanker) return;
  // pre_j(v) = b1_j + W1[j,:d] u + sum_k (W1[j,d+k] + W1[j,2d+k] u_k) v_k;
  // everything except the v-dependence is fixed by the context.
  const std::size_t d = static_cast<std::size_t>(params.dim());
  const std::size_t hidden = static_cast<std::size_t>(params.hidden());
  const std::size_t in = 3 * d;
  const auto dense = params.dense();
  const double* w1 = dense.data();
  const double* b1 = w1 + hidden * in;
  const auto& u = context_embedding_;
  context_pre_.resize(hidden);
  item_weights_.resize(hidden * d);
  for (std::size_t j = 0; j < hidden; ++j) {
    const double* row = w1 + j * in;
    double pre = b1[j];
    for (std::size_t k = 0; k < d; ++k) pre += row[k] * u[k];
    context_pre_[j] = pre;
    for (std::size_t k = 0; k < d; ++k) {
      item_weights_[k * hidden + j] = row[d + k] + row[2 * d + k] * u[k];
    }
  }
}

double BoundScorer::RankerForward(std::span<const double> item_emb,
                                  double* h_out) const {
  const std::size_t d = item_emb.size();
  const std::size_t hidden = context_pre_.size();
  const double* w2 = params_->dense().data() + hidden * 3 * d + hidden;
  double buf[256];
  std::vector<double> heap;
  double* pre = h_out;
  if (pre == nullptr) {
    if (hidden > std::size(buf)) heap.resize(hidden);
    pre = hidden > std::size(buf) ? heap.data() : buf;
  }
  std::copy(context_pre_.begin(), context_pre_.end(), pre);
  for (std::size_t k = 0; k < d; ++k) {
    const double* a = item_weights_.data() + k * hidden;
    const double vk = item_emb[k];
    for (std::size_t j = 0; j < hidden; ++j) pre[j] += a[j] * vk;
  }
  double s = w2[hidden];
  for (std::size_t j = 0; j < hidden; ++j) {
    pre[j] = Sigmoid(pre[j]);
    s += w2[j] * pre[j];
  }
  return s;
}

double BoundScorer::Score(ItemId item) const {
  const auto e = params_->embedding(item);
  if (params_->kind() == ModelKind::kRetriever) {
    double s = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      s += context_embedding_[k] * e[k];
    }
    return s;
  }
  return RankerForward(e, nullptr);
}

std::vector<double> BoundScorer::ScoreAll() const {
  std::vector<double> out(static_cast<std::size_t>(params_->num_items()));
  for (ItemId i = 0; i < params_->num_items(); ++i) out[i] = Score(i);
  return out;
}

void BoundScorer::AccumulateGrad(ItemId item, double weight,
                                 Gradient& grad) const {
  const ItemId items[] = {item};
  const double weights[] = {weight};
  AccumulateGrads(items, weights, grad);
}

void BoundScorer::AccumulateGrads(std::span<const ItemId> items,
                                  std::span<const double> weights,
                                  Gradient& grad) const {
  if (items.size() != weights.size()) {
    throw std::invalid_argument("items and weights differ in length");
  }
  if (items.empty()) return;
  const std::size_t d = static_cast<std::size_t>(params_->dim());
  const auto& u = context_embedding_;
  const double inv_len =
      ctx_->history.empty() ? 0.0 : 1.0 / ctx_->history.size();
  // Summed over items, then spread over the history rows once.
  std::vector<double> hist(d, 0.0);

  if (params_->kind() == ModelKind::kRetriever) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto e = params_->embedding(items[i]);
      auto row = grad.MutableRow(items[i]);
      for (std::size_t k = 0; k < d; ++k) {
        row[k] += weights[i] * u[k];
        hist[k] += weights[i] * e[k];
      }
    }
  } else {
    const std::size_t hidden = context_pre_.size();
    const std::size_t in = 3 * d;
    const auto dense = params_->dense();
    const double* w1 = dense.data();
    const double* w2 = w1 + hidden * in + hidden;
    auto g = grad.MutableDense(params_->dense_size());
    double* gw1 = g.data();
    double* gb1 = gw1 + hidden * in;
    double* gw2 = gb1 + hidden;
    double* gb2 = gw2 + hidden;

    // scratch: h | dpre | context coefficient per unit | item row | uv term
    std::vector<double> scratch(3 * hidden + 2 * d, 0.0);
    double* h = scratch.data();
    double* dpre = h + hidden;
    double* coef = dpre + hidden;
    double* item_g = coef + hidden;
    double* uv = item_g + d;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const double w = weights[i];
      const auto v = params_->embedding(items[i]);
      RankerForward(v, h);
      std::fill(item_g, item_g + d, 0.0);
      std::fill(uv, uv + d, 0.0);
      for (std::size_t j = 0; j < hidden; ++j) {
        dpre[j] = w2[j] * h[j] * (1.0 - h[j]);
        const double wd = w * dpre[j];
        coef[j] += wd;
        gb1[j] += wd;
        gw2[j] += w * h[j];
        double* grow = gw1 + j * in;
        const double* row = w1 + j * in;
        for (std::size_t k = 0; k < d; ++k) {
          grow[d + k] += wd * v[k];
          grow[2 * d + k] += wd * u[k] * v[k];
          item_g[k] += dpre[j] * row[d + k];
          uv[k] += dpre[j] * row[2 * d + k];
        }
      }
      *gb2 += w;
      auto row = grad.MutableRow(items[i]);
      for (std::size_t k = 0; k < d; ++k) {
        row[k] += w * (item_g[k] + uv[k] * u[k]);
        hist[k] += w * uv[k] * v[k];
      }
    }
    for (std::size_t j = 0; j < hidden; ++j) {
      double* grow = gw1 + j * in;
      const double* row = w1 + j * in;
      for (std::size_t k = 0; k < d; ++k) {
        grow[k] += coef[j] * u[k];
        hist[k] += coef[j] * row[k];
      }
    }
  }

  for (ItemId hi : ctx_->history) {
    auto row = grad.MutableRow(hi);
    for (std::size_t k = 0; k < d; ++k) row[k] += inv_len * hist[k];
  }
}

double RetrieverScore(const ScorerParams& params, ItemId item,
                      const Context& ctx) {
  const auto u = ContextEmbedding(params, ctx);
  const auto e = params.embedding(item);
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * e[k];
  return s;
}

double RankerScore(const ScorerParams& params, ItemId item,
                   const Context& ctx) {
  return BoundScorer(params, ctx).Score(item);
}

double Score(const ScorerParams& params, ItemId item, const Context& ctx) {
  return params.kind() == ModelKind::kRetriever
             ? RetrieverScore(params, item, ctx)
             : RankerScore(params, item, ctx);
}

ScoreAndGrad ScoreWithGrad(const ScorerParams& params, ItemId item,
                           const Context& ctx) {
  BoundScorer scorer(params, ctx);
  ScoreAndGrad out{scorer.Score(item), Gradient(params.dim())};
  scorer.AccumulateGrad(item, 1.0, out.gradient);
  return out;
}

std::vector<double> ScoreAll(const ScorerParams& params, const Context& ctx) {
  return BoundScorer(params, ctx).ScoreAll();
}

void ApplySgd(ScorerParams& params, const Gradient& grad, double learning_rate,
              double weight_decay) {
  if (learning_rate == 0.0) return;
  for (const auto& [item, g] : grad.rows()) {
    auto row = params.embedding(item);
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] -= learning_rate * (g[k] + weight_decay * row[k]);
    }
  }
  if (!grad.dense().empty()) {
    auto dense = params.dense();
    const auto& g = grad.dense();
    for (std::size_t j = 0; j < dense.size(); ++j) {
      dense[j] -= learning_rate * (g[j] + weight_decay * dense[j]);
    }
  }
}

// -------------------------------------------------------------- checkpoint

namespace {

constexpr char kMagic[8] = {'C', 'O', 'T', 'R', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void WritePod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw DataError("truncated checkpoint");
  }
  return v;
}

}  // namespace

void SaveCheckpoint(const ScorerParams& params, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  WritePod<std::uint32_t>(out, kFormatVersion);
  WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(params.kind()));
  WritePod<std::int32_t>(out, params.num_items());
  WritePod<std::int32_t>(out, params.dim());
  WritePod<std::int32_t>(out, params.hidden());
  WritePod<std::uint32_t>(out, 0);
  WritePod<std::uint64_t>(out, params.seed());
  const auto values = params.values();
  WritePod<std::uint64_t>(out, values.size());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw DataError("failed writing checkpoint");
}

ScorerParams LoadCheckpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint (bad magic)");
  }
  const auto version = ReadPod<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw DataError("unsupported checkpoint version " +
                    std::to_string(version));
  }
  const auto kind_raw = ReadPod<std::uint32_t>(in);
  if (kind_raw != 1 && kind_raw != 2) {
    throw DataError("unknown model kind in checkpoint");
  }
  const auto kind = static_cast<ModelKind>(kind_raw);
  const auto num_items = ReadPod<std::int32_t>(in);
  const auto dim = ReadPod<std::int32_t>(in);
  const auto hidden = ReadPod<std::int32_t>(in);
  ReadPod<std::uint32_t>(in);
  const auto seed = ReadPod<std::uint64_t>(in);
  const auto count = ReadPod<std::uint64_t>(in);
  ScorerParams p(kind, num_items, dim, hidden, seed);
  if (count != p.values_.size()) {
    throw DataError("checkpoint value count does not match its header");
  }
  if (!in.read(reinterpret_cast<char*>(p.values_.data()),
               static_cast<std::streamsize>(count * sizeof(double)))) {
    throw DataError("truncated checkpoint");
  }
  return p;
}

void SaveCheckpoint(const ScorerParams& params,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  SaveCheckpoint(params, out);
}

ScorerParams LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return LoadCheckpoint(in);
}

}  // namespace cotrain
