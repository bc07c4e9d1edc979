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

#include "notesynth/language_model.h"

#include <cmath>
#include <stdexcept>

namespace notesynth {
namespace {

class ContextDecoder final : public Decoder {
 public:
  explicit ContextDecoder(const LanguageModel& model) : model_(model) {}

  Eigen::VectorXd log_distribution() const override {
    return model_.next_log_distribution(context_);
  }
  void push(TokenId token) override { context_.push_back(token); }

 private:
  const LanguageModel& model_;
  std::vector<TokenId> context_;
};

}  // namespace

void LanguageModel::check_token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= vocabulary().size()) {
    throw std::out_of_range("token id outside the model vocabulary");
  }
}

double LanguageModel::log_prob(TokenId next,
                               std::span<const TokenId> context) const {
  check_token(next);
  return next_log_distribution(context)(next);
}

Eigen::VectorXd LanguageModel::next_distribution(
    std::span<const TokenId> context) const {
  return next_log_distribution(context).array().exp().matrix();
}

std::unique_ptr<Decoder> LanguageModel::start_note() const {
  return std::make_unique<ContextDecoder>(*this);
}

std::vector<double> LanguageModel::score_note(
    std::span<const TokenId> note) const {
  std::vector<double> scores;
  scores.reserve(note.size());
  auto decoder = start_note();
  for (TokenId token : note) {
    check_token(token);
    scores.push_back(decoder->log_distribution()(token));
    decoder->push(token);
  }
  return scores;
}

std::vector<std::vector<double>> LanguageModel::score_notes(
    const std::vector<std::vector<TokenId>>& notes) const {
  std::vector<std::vector<double>> out;
  out.reserve(notes.size());
  for (const auto& note : notes) out.push_back(score_note(note));
  return out;
}

std::vector<std::vector<TokenId>> encode_notes(const Corpus& corpus,
                                               const Vocabulary& vocab) {
  std::vector<std::vector<TokenId>> out;
  out.reserve(corpus.notes.size());
  for (const auto& note : corpus.notes) out.push_back(vocab.encode(note));
  return out;
}

double perplexity(const LanguageModel& model, const Corpus& corpus) {
  if (corpus.word_count() == 0) {
    throw ConfigError("perplexity needs a non-empty corpus");
  }
  const auto notes = encode_notes(corpus, model.vocabulary());
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& scores : model.score_notes(notes)) {
    for (double lp : scores) total += lp;
    n += scores.size();
  }
  return std::exp(-total / static_cast<double>(n));
}

}  // namespace notesynth
