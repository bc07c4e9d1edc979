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

#ifndef NOTESYNTH_LANGUAGE_MODEL_H_
#define NOTESYNTH_LANGUAGE_MODEL_H_

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "notesynth/corpus.h"

namespace notesynth {

class LanguageModel;

// Incremental next-token distribution for one note. The context starts empty
// at the beginning of a note.
class Decoder {
 public:
  virtual ~Decoder() = default;
  // Natural-log probabilities over the vocabulary for the next token.
  virtual Eigen::VectorXd log_distribution() const = 0;
  virtual void push(TokenId token) = 0;
};

// Anything that assigns log p(w_i | w_1..i-1) over a fixed vocabulary.
// Trained models are immutable and safe to query concurrently.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::string kind() const = 0;
  virtual const Vocabulary& vocabulary() const = 0;

  // Natural-log distribution of the token following `context`, where the
  // context is the prefix of the current note.
  virtual Eigen::VectorXd next_log_distribution(
      std::span<const TokenId> context) const = 0;

  virtual double log_prob(TokenId next, std::span<const TokenId> context) const;

  Eigen::VectorXd next_distribution(std::span<const TokenId> context) const;

  virtual std::unique_ptr<Decoder> start_note() const;

  // log p(w_i | w_1..i-1) for every position of one note, context reset at
  // the start of the note.
  virtual std::vector<double> score_note(std::span<const TokenId> note) const;

  virtual std::vector<std::vector<double>> score_notes(
      const std::vector<std::vector<TokenId>>& notes) const;

 protected:
  void check_token(TokenId id) const;
};

using ModelPtr = std::shared_ptr<const LanguageModel>;

// A deterministic procedure corpus -> model. Vocabulary and hyperparameters
// are captured by the trainer.
using LmTrainer = std::function<ModelPtr(const Corpus& train)>;

// Token ids of every note under the model's vocabulary.
std::vector<std::vector<TokenId>> encode_notes(const Corpus& corpus,
                                               const Vocabulary& vocab);

// exp of the mean negative log-likelihood over all note tokens; the context
// resets at every note boundary.
double perplexity(const LanguageModel& model, const Corpus& corpus);

}  // namespace notesynth

#endif  // NOTESYNTH_LANGUAGE_MODEL_H_
