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

#include "notesynth/generate.h"

#include <cmath>

namespace notesynth {

TokenId sample_next(const Eigen::VectorXd& log_distribution, double temperature,
                    Rng& rng) {
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (log_distribution.size() == 0) throw ConfigError("empty distribution");
  if (temperature == 0.0) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < log_distribution.size(); ++i) {
      if (log_distribution(i) > log_distribution(best)) best = i;
    }
    return static_cast<TokenId>(best);
  }
  Eigen::VectorXd scaled = log_distribution / temperature;
  scaled.array() -= scaled.maxCoeff();
  Eigen::VectorXd weights = scaled.array().exp();
  const double u = rng.uniform() * weights.sum();
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    cumulative += weights(i);
    if (u < cumulative) return static_cast<TokenId>(i);
  }
  // Rounding left u at the very top; take the last token with mass.
  for (Eigen::Index i = weights.size(); i-- > 0;) {
    if (weights(i) > 0.0) return static_cast<TokenId>(i);
  }
  return 0;
}

TokenId sample_next(const LanguageModel& model,
                    std::span<const TokenId> context, double temperature,
                    Rng& rng) {
  return sample_next(model.next_log_distribution(context), temperature, rng);
}

std::vector<Sentence> split_sentences(const std::vector<std::string>& tokens) {
  std::vector<Sentence> sentences;
  Sentence current;
  for (const auto& token : tokens) {
    current.push_back(token);
    if (token == "." || token == "!" || token == "?") {
      sentences.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

Corpus generate_corpus(const LanguageModel& model,
                       const GenerationConfig& config) {
  if (config.target_word_count < 1) {
    throw ConfigError("target_word_count must be >= 1");
  }
  if (config.max_note_length < 1) {
    throw ConfigError("max_note_length must be >= 1");
  }
  const auto& vocab = model.vocabulary();
  const auto eon = vocab.end_of_note_id();
  if (!eon) throw ConfigError("model vocabulary lacks the end-of-note token");

  Rng rng(config.seed);
  Corpus corpus;
  std::size_t words = 0;
  std::size_t empty_in_a_row = 0;
  while (words < config.target_word_count) {
    auto decoder = model.start_note();
    std::vector<std::string> tokens;
    while (tokens.size() < config.max_note_length) {
      const TokenId next =
          sample_next(decoder->log_distribution(), config.temperature, rng);
      if (next == *eon) break;
      tokens.push_back(vocab.token(next));
      decoder->push(next);
    }
    if (tokens.empty()) {
      if (++empty_in_a_row >= 100000) {
        throw std::runtime_error("generation: model keeps closing empty notes");
      }
      continue;
    }
    empty_in_a_row = 0;
    words += tokens.size();
    Note note;
    note.id = "note-" + std::to_string(corpus.notes.size());
    note.sentences = split_sentences(tokens);
    corpus.notes.push_back(std::move(note));
  }
  return corpus;
}

}  // namespace notesynth
