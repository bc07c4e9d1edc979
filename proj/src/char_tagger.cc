// Copyright 2026 The notesynth Authors.
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

#include "notesynth/char_tagger.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "notesynth/common.h"
#include "notesynth/rng.h"

namespace notesynth {

void CharTaggerConfig::validate() const {
  if (embedding_dim < 1 || hidden_size < 1) {
    throw ConfigError("char tagger: dimensions must be positive");
  }
  if (num_labels < 2) throw ConfigError("char tagger: need at least 2 labels");
  if (epochs < 0) throw ConfigError("char tagger: epochs must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("char tagger: lr must be positive");
  if (batch_size < 1) throw ConfigError("char tagger: batch_size must be >= 1");
  if (!(grad_clip > 0.0)) {
    throw ConfigError("char tagger: grad_clip must be positive");
  }
}

namespace nn {
namespace {

constexpr Index kByteCount = 256;

struct Layout {
  Index steps = 0;
  Index batch = 0;
  std::vector<Index> lengths;
};

Layout make_layout(const std::vector<std::string>& inputs) {
  Layout layout;
  layout.batch = static_cast<Index>(inputs.size());
  for (const auto& s : inputs) {
    layout.lengths.push_back(static_cast<Index>(s.size()));
    layout.steps = std::max(layout.steps, static_cast<Index>(s.size()));
  }
  return layout;
}

inline int byte_at(const std::string& s, Index i) {
  return static_cast<unsigned char>(s[static_cast<std::size_t>(i)]);
}

// Pads are zero columns. The backward direction sees each sequence reversed.
Matrix<double> embed(const CharTaggerParams& params,
                     const std::vector<std::string>& inputs,
                     const Layout& layout, bool reversed) {
  Matrix<double> x =
      Matrix<double>::Zero(params.embedding.rows(), layout.steps * layout.batch);
  for (Index b = 0; b < layout.batch; ++b) {
    const Index len = layout.lengths[b];
    for (Index t = 0; t < len; ++t) {
      const Index src = reversed ? len - 1 - t : t;
      x.col(t * layout.batch + b) =
          params.embedding.col(byte_at(inputs[b], src));
    }
  }
  return x;
}

struct TaggerCache {
  Layout layout;
  LayerCache<double> forward;
  LayerCache<double> backward;
  std::vector<Matrix<double>> features;  // 2H x len per sequence
  std::vector<Matrix<double>> log_probs;
};

void run_forward(const CharTaggerParams& params,
                 const std::vector<std::string>& inputs, TaggerCache& cache) {
  cache.layout = make_layout(inputs);
  const Layout& layout = cache.layout;
  const Index hidden = params.forward.hidden();
  cache.features.clear();
  cache.log_probs.clear();
  if (layout.batch == 0 || layout.steps == 0) {
    for (Index b = 0; b < layout.batch; ++b) {
      cache.features.emplace_back(2 * hidden, 0);
      cache.log_probs.emplace_back(params.w_out.rows(), 0);
    }
    return;
  }

  auto state_f = LayerState<double>::zeros(hidden, layout.batch);
  auto state_b = LayerState<double>::zeros(hidden, layout.batch);
  const Matrix<double> hf =
      layer_forward(params.forward, embed(params, inputs, layout, false),
                    layout.batch, state_f, &cache.forward);
  const Matrix<double> hb =
      layer_forward(params.backward, embed(params, inputs, layout, true),
                    layout.batch, state_b, &cache.backward);

  for (Index b = 0; b < layout.batch; ++b) {
    const Index len = layout.lengths[b];
    Matrix<double> feat(2 * hidden, len);
    for (Index t = 0; t < len; ++t) {
      feat.col(t).head(hidden) = hf.col(t * layout.batch + b);
      feat.col(t).tail(hidden) = hb.col((len - 1 - t) * layout.batch + b);
    }
    Matrix<double> logits = params.w_out * feat;
    logits.colwise() += params.b_out.col(0);
    cache.log_probs.push_back(log_softmax_columns(logits));
    cache.features.push_back(std::move(feat));
  }
}

}  // namespace

CharTaggerParams CharTaggerParams::zeros(const CharTaggerConfig& config) {
  const Index e = config.embedding_dim;
  const Index h = config.hidden_size;
  return {Matrix<double>::Zero(e, kByteCount), LstmLayer<double>::zeros(e, h),
          LstmLayer<double>::zeros(e, h),
          Matrix<double>::Zero(config.num_labels, 2 * h),
          Matrix<double>::Zero(config.num_labels, 1)};
}

CharTaggerParams CharTaggerParams::init(const CharTaggerConfig& config) {
  CharTaggerParams p = zeros(config);
  Rng rng(derive_seed(config.seed, "char-tagger-init"));
  fill_uniform(p.embedding, rng, -0.1, 0.1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.hidden_size));
  for (LstmLayer<double>* layer : {&p.forward, &p.backward}) {
    fill_uniform(layer->w_input, rng, -scale, scale);
    fill_uniform(layer->w_recurrent, rng, -scale, scale);
    // Forget-gate bias of 1.
    layer->bias.middleRows(config.hidden_size, config.hidden_size).setOnes();
  }
  fill_uniform(p.w_out, rng, -scale, scale);
  return p;
}

CharTaggerParams CharTaggerParams::zeros_like() const {
  return {Matrix<double>::Zero(embedding.rows(), embedding.cols()),
          LstmLayer<double>::zeros(forward.input_size(), forward.hidden()),
          LstmLayer<double>::zeros(backward.input_size(), backward.hidden()),
          Matrix<double>::Zero(w_out.rows(), w_out.cols()),
          Matrix<double>::Zero(b_out.rows(), 1)};
}

NamedTensors<double> CharTaggerParams::tensors() {
  NamedTensors<double> out;
  out.emplace_back("embedding", &embedding);
  forward.append_tensors("forward", out);
  backward.append_tensors("backward", out);
  out.emplace_back("w_out", &w_out);
  out.emplace_back("b_out", &b_out);
  return out;
}

std::vector<Matrix<double>> char_tagger_forward(
    const CharTaggerParams& params, const std::vector<std::string>& inputs) {
  TaggerCache cache;
  run_forward(params, inputs, cache);
  return std::move(cache.log_probs);
}

double char_tagger_loss_gradient(const CharTaggerParams& params,
                                 const std::vector<std::string>& inputs,
                                 const std::vector<std::vector<int>>& labels,
                                 CharTaggerParams& grads) {
  if (labels.size() != inputs.size()) {
    throw std::invalid_argument("char tagger: inputs and labels differ in size");
  }
  const Index num_labels = params.w_out.rows();
  Index total = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (labels[i].size() != inputs[i].size()) {
      throw std::invalid_argument("char tagger: one label per byte required");
    }
    for (int y : labels[i]) {
      if (y < 0 || y >= num_labels) {
        throw std::invalid_argument("char tagger: label out of range");
      }
    }
    total += static_cast<Index>(inputs[i].size());
  }
  if (total == 0) return 0.0;

  TaggerCache cache;
  run_forward(params, inputs, cache);
  const Layout& layout = cache.layout;
  const Index hidden = params.forward.hidden();
  const double inv_total = 1.0 / static_cast<double>(total);

  double loss = 0.0;
  Matrix<double> d_hf = Matrix<double>::Zero(hidden, layout.steps * layout.batch);
  Matrix<double> d_hb = Matrix<double>::Zero(hidden, layout.steps * layout.batch);
  for (Index b = 0; b < layout.batch; ++b) {
    const Index len = layout.lengths[b];
    if (len == 0) continue;
    const Matrix<double>& lp = cache.log_probs[b];
    Matrix<double> d_logits = lp.array().exp().matrix();
    for (Index t = 0; t < len; ++t) {
      const int y = labels[b][t];
      loss -= lp(y, t);
      d_logits(y, t) -= 1.0;
    }
    d_logits *= inv_total;
    grads.w_out.noalias() += d_logits * cache.features[b].transpose();
    grads.b_out += d_logits.rowwise().sum();
    const Matrix<double> d_feat = params.w_out.transpose() * d_logits;
    for (Index t = 0; t < len; ++t) {
      d_hf.col(t * layout.batch + b) = d_feat.col(t).head(hidden);
      d_hb.col((len - 1 - t) * layout.batch + b) = d_feat.col(t).tail(hidden);
    }
  }

  const Matrix<double> dx_f = layer_backward(params.forward, cache.forward, d_hf,
                                             layout.batch, grads.forward);
  const Matrix<double> dx_b = layer_backward(
      params.backward, cache.backward, d_hb, layout.batch, grads.backward);
  for (Index b = 0; b < layout.batch; ++b) {
    const Index len = layout.lengths[b];
    for (Index t = 0; t < len; ++t) {
      grads.embedding.col(byte_at(inputs[b], t)) +=
          dx_f.col(t * layout.batch + b) +
          dx_b.col((len - 1 - t) * layout.batch + b);
    }
  }
  return loss * inv_total;
}

}  // namespace nn

Eigen::MatrixXd CharTagger::label_distributions(std::string_view input) const {
  auto lp = nn::char_tagger_forward(params_, {std::string(input)});
  return lp.front().array().exp().matrix();
}

std::vector<int> CharTagger::predict(std::string_view input) const {
  return predict(std::vector<std::string>{std::string(input)}).front();
}

std::vector<std::vector<int>> CharTagger::predict(
    const std::vector<std::string>& inputs) const {
  std::vector<std::vector<int>> out;
  out.reserve(inputs.size());
  constexpr std::size_t kChunk = 64;
  for (std::size_t start = 0; start < inputs.size(); start += kChunk) {
    const std::size_t end = std::min(inputs.size(), start + kChunk);
    std::vector<std::string> chunk(inputs.begin() + start, inputs.begin() + end);
    for (const auto& lp : nn::char_tagger_forward(params_, chunk)) {
      std::vector<int> labels(static_cast<std::size_t>(lp.cols()));
      for (Eigen::Index t = 0; t < lp.cols(); ++t) {
        Eigen::Index best = 0;
        lp.col(t).maxCoeff(&best);
        labels[static_cast<std::size_t>(t)] = static_cast<int>(best);
      }
      out.push_back(std::move(labels));
    }
  }
  return out;
}

CharTagger train_char_classifier(const std::vector<std::string>& inputs,
                                 const std::vector<std::vector<int>>& labels,
                                 const CharTaggerConfig& config) {
  config.validate();
  if (inputs.size() != labels.size()) {
    throw ConfigError("char tagger: inputs and labels differ in size");
  }
  auto params = nn::CharTaggerParams::init(config);
  if (inputs.empty()) return CharTagger(config, std::move(params));

  // Batches group sequences of similar length.
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return inputs[a].size() < inputs[b].size();
  });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += config.batch_size) {
    const std::size_t end =
        std::min(order.size(), i + static_cast<std::size_t>(config.batch_size));
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }

  auto m = params.zeros_like();
  auto v = params.zeros_like();
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  Rng rng(derive_seed(config.seed, "char-tagger-batches"));
  long step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(batches, rng);
    for (const auto& batch : batches) {
      std::vector<std::string> xs;
      std::vector<std::vector<int>> ys;
      for (std::size_t i : batch) {
        xs.push_back(inputs[i]);
        ys.push_back(labels[i]);
      }
      auto grads = params.zeros_like();
      nn::char_tagger_loss_gradient(params, xs, ys, grads);
      auto g = grads.tensors();
      nn::clip_global_norm(g, config.grad_clip);

      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto p = params.tensors();
      auto mt = m.tensors();
      auto vt = v.tensors();
      for (std::size_t k = 0; k < p.size(); ++k) {
        auto& gk = *g[k].second;
        *mt[k].second = kBeta1 * *mt[k].second + (1.0 - kBeta1) * gk;
        vt[k].second->array() =
            kBeta2 * vt[k].second->array() + (1.0 - kBeta2) * gk.array().square();
        p[k].second->array() -=
            config.lr * (mt[k].second->array() / c1) /
            ((vt[k].second->array() / c2).sqrt() + kEps);
      }
    }
  }
  return CharTagger(config, std::move(params));
}

}  // namespace notesynth
