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

#ifndef NOTESYNTH_LSTM_LM_H_
#define NOTESYNTH_LSTM_LM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "notesynth/language_model.h"
#include "notesynth/lstm.h"
#include "notesynth/rng.h"

namespace notesynth {

// "medtext2": divide the rate by 4 after any epoch whose validation loss did
// not go down relative to the previous epoch.
// "medtext103": every 1/40 epoch, divide by 1.2 unless the validation loss went
// down by at least 0.1 since the previous check; never below 0.1.
enum class LrPolicy { kMedText2, kMedText103 };

std::string_view to_string(LrPolicy policy);
LrPolicy parse_lr_policy(std::string_view name);

struct LstmLmConfig {
  int layers = 2;
  int hidden_size = 650;
  double dropout = 0.0;
  double initial_lr = 20.0;
  LrPolicy lr_policy = LrPolicy::kMedText2;
  int epochs = 20;
  double grad_clip = 0.25;
  int bptt = 35;
  int batch_size = 20;
  bool tied_embeddings = true;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

class LrSchedule {
 public:
  LrSchedule(LrPolicy policy, double initial_lr)
      : policy_(policy), lr_(initial_lr) {}

  double lr() const { return lr_; }
  LrPolicy policy() const { return policy_; }
  int checks_per_epoch() const {
    return policy_ == LrPolicy::kMedText2 ? 1 : 40;
  }
  // Feeds the validation loss measured at a check point.
  void observe(double valid_loss);

 private:
  LrPolicy policy_;
  double lr_;
  std::optional<double> previous_;
};

namespace nn {

// Embedding matrix is H x V (one column per token); the output projection is
// its transpose, so tied weights share a single storage.
template <typename Scalar>
struct LstmLmParams {
  Matrix<Scalar> embedding;
  std::vector<LstmLayer<Scalar>> layers;
  Matrix<Scalar> output_bias;  // V x 1

  Index hidden() const { return embedding.rows(); }
  Index vocab_size() const { return embedding.cols(); }

  static LstmLmParams zeros(Index vocab_size, Index hidden, int num_layers);
  static LstmLmParams init(Index vocab_size, Index hidden, int num_layers,
                           std::uint64_t seed);
  LstmLmParams zeros_like() const {
    return zeros(vocab_size(), hidden(), static_cast<int>(layers.size()));
  }

  // Fixed order: embedding, layer0.{w_input,w_recurrent,bias}, ...,
  // output_bias. This is also the on-disk order.
  NamedTensors<Scalar> tensors();
};

template <typename Scalar>
struct LmState {
  std::vector<LayerState<Scalar>> layers;

  static LmState zeros(const LstmLmParams<Scalar>& params, Index batch);
};

template <typename Scalar>
struct LmForwardCache {
  TokenBatch inputs;
  std::vector<Matrix<Scalar>> masks;  // one per dropout site, empty if off
  std::vector<LayerCache<Scalar>> layers;
  Matrix<Scalar> top;        // H x TB, last layer output after dropout
  Matrix<Scalar> log_probs;  // V x TB
};

struct Dropout {
  double rate = 0.0;
  Rng* rng = nullptr;  // null disables dropout

  bool enabled() const { return rng != nullptr && rate > 0.0; }
};

// Returns next-token log-probabilities (V x TB) and advances `state`.
// Dropout sites: embedding output, between layers, before the projection.
template <typename Scalar>
Matrix<Scalar> lstm_forward(const LstmLmParams<Scalar>& params,
                            const TokenBatch& inputs, LmState<Scalar>& state,
                            const Dropout& dropout,
                            LmForwardCache<Scalar>* cache = nullptr);

// Mean cross-entropy over targets != -1; adds parameter gradients to `grads`.
// With no targets the loss and gradients are zero.
template <typename Scalar>
double lstm_backward(const LstmLmParams<Scalar>& params,
                     const LmForwardCache<Scalar>& cache,
                     const std::vector<TokenId>& targets,
                     LstmLmParams<Scalar>& grads);

extern template struct LstmLmParams<double>;
extern template struct LstmLmParams<float>;

}  // namespace nn

struct EpochLog {
  int epoch = 0;
  double train_perplexity = 0.0;
  double valid_perplexity = 0.0;
  double lr = 0.0;
};

// Adapter exposing a trained network through the LanguageModel contract.
// Each note is scored from a zero state fed with the end-of-note token.
template <typename Scalar>
class LstmLanguageModel final : public LanguageModel {
 public:
  LstmLanguageModel(Vocabulary vocab, LstmLmConfig config,
                    nn::LstmLmParams<Scalar> params);

  std::string kind() const override { return "lstm"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  Eigen::VectorXd next_log_distribution(
      std::span<const TokenId> context) const override;
  std::unique_ptr<Decoder> start_note() const override;
  std::vector<double> score_note(std::span<const TokenId> note) const override;
  std::vector<std::vector<double>> score_notes(
      const std::vector<std::vector<TokenId>>& notes) const override;

  const LstmLmConfig& config() const { return config_; }
  const nn::LstmLmParams<Scalar>& params() const { return params_; }
  TokenId end_of_note() const { return eon_; }

 private:
  Vocabulary vocab_;
  LstmLmConfig config_;
  nn::LstmLmParams<Scalar> params_;
  TokenId eon_;
};

using LstmModel = LstmLanguageModel<double>;

extern template class LstmLanguageModel<double>;
extern template class LstmLanguageModel<float>;

// Training stream: <eon> note_1 <eon> note_2 <eon> ... note_n <eon>.
std::vector<TokenId> training_stream(const Corpus& corpus,
                                     const Vocabulary& vocab);

// Mean negative log-likelihood per note token with per-note state reset.
double mean_note_nll(const LanguageModel& model,
                     const std::vector<std::vector<TokenId>>& notes);

// Thrown when the training loss becomes non-finite.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Truncated-BPTT SGD with global gradient clipping and the configured rate
// schedule. Returns the parameters of the check point with the best
// validation loss (training loss when `valid` is empty). The vocabulary must
// contain the end-of-note token.
template <typename Scalar = double>
LstmLanguageModel<Scalar> train_lstm_lm(const Corpus& train,
                                        const Corpus& valid,
                                        const Vocabulary& vocab,
                                        const LstmLmConfig& config,
                                        std::vector<EpochLog>* log = nullptr);

extern template LstmLanguageModel<double> train_lstm_lm<double>(
    const Corpus&, const Corpus&, const Vocabulary&, const LstmLmConfig&,
    std::vector<EpochLog>*);
extern template LstmLanguageModel<float> train_lstm_lm<float>(
    const Corpus&, const Corpus&, const Vocabulary&, const LstmLmConfig&,
    std::vector<EpochLog>*);

}  // namespace notesynth

#endif  // NOTESYNTH_LSTM_LM_H_
