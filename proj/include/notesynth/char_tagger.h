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

#ifndef NOTESYNTH_CHAR_TAGGER_H_
#define NOTESYNTH_CHAR_TAGGER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "notesynth/lstm.h"

namespace notesynth {

// Bidirectional single-layer LSTM over bytes with a per-byte softmax. Trained
// with Adam and global gradient clipping.
struct CharTaggerConfig {
  int embedding_dim = 16;
  int hidden_size = 32;
  int num_labels = 2;
  int epochs = 10;
  double lr = 0.01;
  int batch_size = 16;
  double grad_clip = 5.0;
  std::uint64_t seed = 1;

  void validate() const;
};

namespace nn {

struct CharTaggerParams {
  Matrix<double> embedding;  // E x 256
  LstmLayer<double> forward;
  LstmLayer<double> backward;
  Matrix<double> w_out;  // L x 2H
  Matrix<double> b_out;  // L x 1

  static CharTaggerParams zeros(const CharTaggerConfig& config);
  static CharTaggerParams init(const CharTaggerConfig& config);
  CharTaggerParams zeros_like() const;
  NamedTensors<double> tensors();
};

// Per-byte label log-probabilities (L x len) for each sequence of the batch.
std::vector<Matrix<double>> char_tagger_forward(
    const CharTaggerParams& params, const std::vector<std::string>& inputs);

// Mean negative log-likelihood over every byte of the batch, with gradients
// added into `grads`.
double char_tagger_loss_gradient(const CharTaggerParams& params,
                                 const std::vector<std::string>& inputs,
                                 const std::vector<std::vector<int>>& labels,
                                 CharTaggerParams& grads);

}  // namespace nn

class CharTagger {
 public:
  CharTagger(CharTaggerConfig config, nn::CharTaggerParams params)
      : config_(config), params_(std::move(params)) {}

  // Columns are per-byte label distributions.
  Eigen::MatrixXd label_distributions(std::string_view input) const;
  std::vector<int> predict(std::string_view input) const;
  std::vector<std::vector<int>> predict(const std::vector<std::string>& inputs) const;

  const CharTaggerConfig& config() const { return config_; }
  const nn::CharTaggerParams& params() const { return params_; }

 private:
  CharTaggerConfig config_;
  nn::CharTaggerParams params_;
};

// `labels[i]` holds one label in [0, num_labels) per byte of `inputs[i]`.
CharTagger train_char_classifier(const std::vector<std::string>& inputs,
                                 const std::vector<std::vector<int>>& labels,
                                 const CharTaggerConfig& config);

}  // namespace notesynth

#endif  // NOTESYNTH_CHAR_TAGGER_H_
