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

#include "notesynth/lstm_lm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace notesynth {

std::string_view to_string(LrPolicy policy) {
  return policy == LrPolicy::kMedText2 ? "medtext2" : "medtext103";
}

LrPolicy parse_lr_policy(std::string_view name) {
  if (name == "medtext2") return LrPolicy::kMedText2;
  if (name == "medtext103") return LrPolicy::kMedText103;
  throw ConfigError("unknown lr policy: " + std::string(name));
}

void LstmLmConfig::validate() const {
  if (layers < 1) throw ConfigError("lstm: layers must be >= 1");
  if (hidden_size < 1) throw ConfigError("lstm: hidden_size must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("lstm: dropout must be in [0, 1)");
  }
  if (!(initial_lr > 0.0)) throw ConfigError("lstm: initial_lr must be > 0");
  if (epochs < 1) throw ConfigError("lstm: epochs must be >= 1");
  if (!(grad_clip > 0.0)) throw ConfigError("lstm: grad_clip must be > 0");
  if (bptt < 1) throw ConfigError("lstm: bptt must be >= 1");
  if (batch_size < 1) throw ConfigError("lstm: batch_size must be >= 1");
  if (!tied_embeddings) {
    throw ConfigError("lstm: only tied input/output embeddings are supported");
  }
}

void LrSchedule::observe(double valid_loss) {
  if (previous_) {
    if (policy_ == LrPolicy::kMedText2) {
      if (!(valid_loss < *previous_)) lr_ /= 4.0;
    } else if (*previous_ - valid_loss < 0.1) {
      lr_ = std::max(lr_ / 1.2, std::min(lr_, 0.1));
    }
  }
  previous_ = valid_loss;
}

namespace nn {

template <typename Scalar>
LstmLmParams<Scalar> LstmLmParams<Scalar>::zeros(Index vocab_size,
                                                 Index hidden, int num_layers) {
  LstmLmParams p;
  p.embedding = Matrix<Scalar>::Zero(hidden, vocab_size);
  for (int l = 0; l < num_layers; ++l) {
    p.layers.push_back(LstmLayer<Scalar>::zeros(hidden, hidden));
  }
  p.output_bias = Matrix<Scalar>::Zero(vocab_size, 1);
  return p;
}

template <typename Scalar>
LstmLmParams<Scalar> LstmLmParams<Scalar>::init(Index vocab_size, Index hidden,
                                                int num_layers,
                                                std::uint64_t seed) {
  auto p = zeros(vocab_size, hidden, num_layers);
  Rng rng(seed);
  fill_uniform(p.embedding, rng, -0.1, 0.1);
  for (auto& layer : p.layers) {
    fill_uniform(layer.w_input, rng, -0.1, 0.1);
    fill_uniform(layer.w_recurrent, rng, -0.1, 0.1);
  }
  return p;
}

template <typename Scalar>
NamedTensors<Scalar> LstmLmParams<Scalar>::tensors() {
  NamedTensors<Scalar> out;
  out.emplace_back("embedding", &embedding);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].append_tensors("layer" + std::to_string(l), out);
  }
  out.emplace_back("output_bias", &output_bias);
  return out;
}

template <typename Scalar>
LmState<Scalar> LmState<Scalar>::zeros(const LstmLmParams<Scalar>& params,
                                       Index batch) {
  LmState s;
  for (const auto& layer : params.layers) {
    s.layers.push_back(LayerState<Scalar>::zeros(layer.hidden(), batch));
  }
  return s;
}

template <typename Scalar>
Matrix<Scalar> lstm_forward(const LstmLmParams<Scalar>& params,
                            const TokenBatch& inputs, LmState<Scalar>& state,
                            const Dropout& dropout,
                            LmForwardCache<Scalar>* cache) {
  const Index hidden = params.hidden();
  const Index vocab = params.vocab_size();
  const Index total = inputs.steps * inputs.batch;
  if (static_cast<Index>(inputs.ids.size()) != total ||
      state.layers.size() != params.layers.size()) {
    throw std::invalid_argument("lstm forward: dimension mismatch");
  }

  Matrix<Scalar> x(hidden, total);
  for (Index k = 0; k < total; ++k) {
    const TokenId id = inputs.ids[k];
    if (id < 0 || id >= vocab) {
      throw std::invalid_argument("lstm forward: token id out of range");
    }
    x.col(k) = params.embedding.col(id);
  }

  const bool drop = dropout.enabled();
  std::vector<Matrix<Scalar>> masks;
  auto apply_mask = [&](Matrix<Scalar>& m) {
    if (!drop) return;
    masks.push_back(dropout_mask<Scalar>(m.rows(), m.cols(), dropout.rate,
                                         *dropout.rng));
    m.array() *= masks.back().array();
  };

  if (cache) {
    cache->inputs = inputs;
    cache->layers.assign(params.layers.size(), LayerCache<Scalar>{});
  }
  std::vector<std::uint8_t> reset;
  if (inputs.reset_token >= 0) {
    reset.resize(static_cast<std::size_t>(total));
    for (Index k = 0; k < total; ++k) {
      reset[k] = inputs.ids[k] == inputs.reset_token;
    }
  }
  apply_mask(x);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    x = layer_forward(params.layers[l], x, inputs.batch, state.layers[l],
                      cache ? &cache->layers[l] : nullptr,
                      reset.empty() ? nullptr : &reset);
    apply_mask(x);
  }

  Matrix<Scalar> logits = params.embedding.transpose() * x;
  logits.colwise() += params.output_bias.col(0);
  Matrix<Scalar> log_probs = log_softmax_columns(logits);
  if (cache) {
    cache->masks = std::move(masks);
    cache->top = std::move(x);
    cache->log_probs = log_probs;
  }
  return log_probs;
}

template <typename Scalar>
double lstm_backward(const LstmLmParams<Scalar>& params,
                     const LmForwardCache<Scalar>& cache,
                     const std::vector<TokenId>& targets,
                     LstmLmParams<Scalar>& grads) {
  const Index total = cache.log_probs.cols();
  if (static_cast<Index>(targets.size()) != total) {
    throw std::invalid_argument("lstm backward: target count mismatch");
  }
  Index count = 0;
  double loss = 0.0;
  Matrix<Scalar> d_logits = cache.log_probs.array().exp().matrix();
  for (Index k = 0; k < total; ++k) {
    const TokenId target = targets[k];
    if (target < 0) {
      d_logits.col(k).setZero();
      continue;
    }
    ++count;
    loss -= static_cast<double>(cache.log_probs(target, k));
    d_logits(target, k) -= Scalar(1);
  }
  if (count == 0) return 0.0;
  d_logits /= static_cast<Scalar>(count);

  const bool drop = !cache.masks.empty();
  const std::size_t num_layers = params.layers.size();

  grads.output_bias += d_logits.rowwise().sum();
  grads.embedding.noalias() += cache.top * d_logits.transpose();
  Matrix<Scalar> d = params.embedding * d_logits;
  if (drop) d.array() *= cache.masks[num_layers].array();

  for (std::size_t l = num_layers; l-- > 0;) {
    d = layer_backward(params.layers[l], cache.layers[l], d,
                       cache.inputs.batch, grads.layers[l]);
    if (drop) d.array() *= cache.masks[l].array();
  }
  for (Index k = 0; k < total; ++k) {
    grads.embedding.col(cache.inputs.ids[k]) += d.col(k);
  }
  return loss / static_cast<double>(count);
}

template struct LstmLmParams<double>;
template struct LstmLmParams<float>;
template struct LmState<double>;
template struct LmState<float>;
template Matrix<double> lstm_forward(const LstmLmParams<double>&,
                                     const TokenBatch&, LmState<double>&,
                                     const Dropout&, LmForwardCache<double>*);
template Matrix<float> lstm_forward(const LstmLmParams<float>&,
                                    const TokenBatch&, LmState<float>&,
                                    const Dropout&, LmForwardCache<float>*);
template double lstm_backward(const LstmLmParams<double>&,
                              const LmForwardCache<double>&,
                              const std::vector<TokenId>&,
                              LstmLmParams<double>&);
template double lstm_backward(const LstmLmParams<float>&,
                              const LmForwardCache<float>&,
                              const std::vector<TokenId>&,
                              LstmLmParams<float>&);

}  // namespace nn

namespace {

template <typename Scalar>
class LstmDecoder final : public Decoder {
 public:
  LstmDecoder(const nn::LstmLmParams<Scalar>& params, TokenId eon)
      : params_(params), state_(nn::LmState<Scalar>::zeros(params, 1)) {
    push(eon);
  }

  Eigen::VectorXd log_distribution() const override { return current_; }

  void push(TokenId token) override {
    nn::TokenBatch batch{1, 1, {token}};
    current_ = nn::lstm_forward(params_, batch, state_, nn::Dropout{})
                   .col(0)
                   .template cast<double>();
  }

 private:
  const nn::LstmLmParams<Scalar>& params_;
  nn::LmState<Scalar> state_;
  Eigen::VectorXd current_;
};

}  // namespace

template <typename Scalar>
LstmLanguageModel<Scalar>::LstmLanguageModel(Vocabulary vocab,
                                             LstmLmConfig config,
                                             nn::LstmLmParams<Scalar> params)
    : vocab_(std::move(vocab)), config_(config), params_(std::move(params)) {
  const auto eon = vocab_.end_of_note_id();
  if (!eon) {
    throw ConfigError("lstm model vocabulary lacks the end-of-note token");
  }
  eon_ = *eon;
  if (params_.vocab_size() != static_cast<nn::Index>(vocab_.size()) ||
      params_.hidden() != config_.hidden_size ||
      static_cast<int>(params_.layers.size()) != config_.layers) {
    throw ConfigError("lstm parameters do not match config/vocabulary");
  }
}

template <typename Scalar>
Eigen::VectorXd LstmLanguageModel<Scalar>::next_log_distribution(
    std::span<const TokenId> context) const {
  LstmDecoder<Scalar> decoder(params_, eon_);
  for (TokenId id : context) {
    check_token(id);
    decoder.push(id);
  }
  return decoder.log_distribution();
}

template <typename Scalar>
std::unique_ptr<Decoder> LstmLanguageModel<Scalar>::start_note() const {
  return std::make_unique<LstmDecoder<Scalar>>(params_, eon_);
}

template <typename Scalar>
std::vector<double> LstmLanguageModel<Scalar>::score_note(
    std::span<const TokenId> note) const {
  std::vector<std::vector<TokenId>> one{{note.begin(), note.end()}};
  return score_notes(one).front();
}

template <typename Scalar>
std::vector<std::vector<double>> LstmLanguageModel<Scalar>::score_notes(
    const std::vector<std::vector<TokenId>>& notes) const {
  constexpr std::size_t kNotesPerBatch = 32;
  constexpr nn::Index kStepsPerChunk = 64;
  std::vector<std::vector<double>> out(notes.size());
  for (std::size_t first = 0; first < notes.size(); first += kNotesPerBatch) {
    const std::size_t last = std::min(notes.size(), first + kNotesPerBatch);
    const auto batch = static_cast<nn::Index>(last - first);
    nn::Index longest = 0;
    for (std::size_t n = first; n < last; ++n) {
      for (TokenId id : notes[n]) check_token(id);
      out[n].resize(notes[n].size());
      longest = std::max<nn::Index>(longest, notes[n].size());
    }
    auto state = nn::LmState<Scalar>::zeros(params_, batch);
    for (nn::Index start = 0; start < longest; start += kStepsPerChunk) {
      const nn::Index steps = std::min(kStepsPerChunk, longest - start);
      nn::TokenBatch inputs{steps, batch, {}};
      inputs.ids.resize(steps * batch);
      for (nn::Index t = 0; t < steps; ++t) {
        const nn::Index pos = start + t;
        for (nn::Index b = 0; b < batch; ++b) {
          const auto& note = notes[first + b];
          inputs.ids[t * batch + b] =
              (pos == 0 || pos > static_cast<nn::Index>(note.size()))
                  ? eon_
                  : note[pos - 1];
        }
      }
      const auto lp = nn::lstm_forward(params_, inputs, state, nn::Dropout{});
      for (nn::Index t = 0; t < steps; ++t) {
        const nn::Index pos = start + t;
        for (nn::Index b = 0; b < batch; ++b) {
          const auto& note = notes[first + b];
          if (pos < static_cast<nn::Index>(note.size())) {
            out[first + b][pos] =
                static_cast<double>(lp(note[pos], t * batch + b));
          }
        }
      }
    }
  }
  return out;
}

template class LstmLanguageModel<double>;
template class LstmLanguageModel<float>;

std::vector<TokenId> training_stream(const Corpus& corpus,
                                     const Vocabulary& vocab) {
  const auto eon = vocab.end_of_note_id();
  if (!eon) throw ConfigError("vocabulary lacks the end-of-note token");
  std::vector<TokenId> stream{*eon};
  for (const auto& note : corpus.notes) {
    for (TokenId id : vocab.encode(note)) stream.push_back(id);
    stream.push_back(*eon);
  }
  return stream;
}

double mean_note_nll(const LanguageModel& model,
                     const std::vector<std::vector<TokenId>>& notes) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& scores : model.score_notes(notes)) {
    for (double lp : scores) total -= lp;
    n += scores.size();
  }
  if (n == 0) throw ConfigError("no tokens to score");
  return total / static_cast<double>(n);
}

template <typename Scalar>
LstmLanguageModel<Scalar> train_lstm_lm(const Corpus& train,
                                        const Corpus& valid,
                                        const Vocabulary& vocab,
                                        const LstmLmConfig& config,
                                        std::vector<EpochLog>* log) {
  using nn::Index;
  config.validate();
  const auto stream = training_stream(train, vocab);
  if (stream.size() < 3) throw ConfigError("lstm: training corpus too small");

  // Fold the stream into `batch` parallel columns.
  const Index n = static_cast<Index>(stream.size());
  const Index batch =
      std::max<Index>(1, std::min<Index>(config.batch_size, (n - 1) / 2));
  const Index column = n / batch;

  const Index vocab_size = static_cast<Index>(vocab.size());
  auto params = nn::LstmLmParams<Scalar>::init(
      vocab_size, config.hidden_size, config.layers,
      derive_seed(config.seed, "lstm-init"));
  Rng dropout_rng(derive_seed(config.seed, "lstm-dropout"));
  const nn::Dropout dropout{config.dropout, &dropout_rng};

  const auto valid_notes =
      valid.empty() ? std::vector<std::vector<TokenId>>{}
                    : encode_notes(valid, vocab);
  const auto train_notes = encode_notes(train, vocab);
  auto eval_loss = [&](const nn::LstmLmParams<Scalar>& p) {
    LstmLanguageModel<Scalar> model(vocab, config, p);
    return mean_note_nll(model, valid_notes.empty() ? train_notes : valid_notes);
  };

  LrSchedule schedule(config.lr_policy, config.initial_lr);
  const Index steps_per_epoch = (column - 1 + config.bptt - 1) / config.bptt;
  const Index check_every =
      std::max<Index>(1, steps_per_epoch / schedule.checks_per_epoch());

  auto best = params;
  double best_loss = std::numeric_limits<double>::infinity();
  auto check = [&](bool epoch_end) {
    const double loss = eval_loss(params);
    if (!std::isfinite(loss)) return loss;
    if (loss < best_loss) {
      best_loss = loss;
      best = params;
    }
    if (schedule.policy() == LrPolicy::kMedText103 || epoch_end) {
      schedule.observe(loss);
    }
    return loss;
  };

  auto grads = params.zeros_like();
  nn::LmForwardCache<Scalar> cache;
  nn::TokenBatch inputs;
  // Notes are scored from a fresh state, so training resets at each boundary.
  inputs.reset_token = *vocab.end_of_note_id();
  std::vector<TokenId> targets;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    auto state = nn::LmState<Scalar>::zeros(params, batch);
    double epoch_loss = 0.0;
    Index epoch_tokens = 0;
    Index step = 0;
    const double epoch_lr = schedule.lr();
    double last_check_loss = 0.0;
    for (Index i = 0; i + 1 < column; i += config.bptt, ++step) {
      const Index steps = std::min<Index>(config.bptt, column - 1 - i);
      inputs.steps = steps;
      inputs.batch = batch;
      inputs.ids.resize(steps * batch);
      targets.resize(steps * batch);
      for (Index t = 0; t < steps; ++t) {
        for (Index b = 0; b < batch; ++b) {
          inputs.ids[t * batch + b] = stream[b * column + i + t];
          targets[t * batch + b] = stream[b * column + i + t + 1];
        }
      }
      nn::lstm_forward(params, inputs, state, dropout, &cache);
      for (auto& [name, g] : grads.tensors()) g->setZero();
      const double loss = nn::lstm_backward(params, cache, targets, grads);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "lstm training diverged at epoch " << epoch << " step " << step;
        throw TrainingDiverged(msg.str());
      }
      epoch_loss += loss * static_cast<double>(steps * batch);
      epoch_tokens += steps * batch;

      const auto grad_tensors = grads.tensors();
      nn::clip_global_norm(grad_tensors, config.grad_clip);
      const auto lr = static_cast<Scalar>(schedule.lr());
      auto param_tensors = params.tensors();
      for (std::size_t k = 0; k < param_tensors.size(); ++k) {
        *param_tensors[k].second -= lr * *grad_tensors[k].second;
      }

      if (schedule.policy() == LrPolicy::kMedText103 &&
          (step + 1) % check_every == 0) {
        last_check_loss = check(false);
      }
    }
    if (schedule.policy() == LrPolicy::kMedText2 ||
        steps_per_epoch % check_every != 0) {
      last_check_loss = check(true);
    }
    if (!std::isfinite(last_check_loss)) {
      std::ostringstream msg;
      msg << "lstm validation loss is not finite after epoch " << epoch;
      throw TrainingDiverged(msg.str());
    }
    if (log) {
      log->push_back({epoch,
                      std::exp(epoch_loss / static_cast<double>(epoch_tokens)),
                      std::exp(last_check_loss), epoch_lr});
    }
  }
  return LstmLanguageModel<Scalar>(vocab, config, std::move(best));
}

template LstmLanguageModel<double> train_lstm_lm<double>(
    const Corpus&, const Corpus&, const Vocabulary&, const LstmLmConfig&,
    std::vector<EpochLog>*);
template LstmLanguageModel<float> train_lstm_lm<float>(
    const Corpus&, const Corpus&, const Vocabulary&, const LstmLmConfig&,
    std::vector<EpochLog>*);

}  // namespace notesynth
