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

#ifndef NOTESYNTH_GENERATE_H_
#define NOTESYNTH_GENERATE_H_

#include <cstdint>

#include "notesynth/language_model.h"
#include "notesynth/rng.h"

namespace notesynth {

struct GenerationConfig {
  std::size_t target_word_count = 1;
  double temperature = 1.0;
  std::uint64_t seed = 1;
  std::size_t max_note_length = 2000;
};

// Draws the next token from natural-log probabilities. Temperature 0 is
// argmax with ties going to the lowest id; otherwise the log-probabilities
// are divided by the temperature and renormalized.
TokenId sample_next(const Eigen::VectorXd& log_distribution, double temperature,
                    Rng& rng);

TokenId sample_next(const LanguageModel& model,
                    std::span<const TokenId> context, double temperature,
                    Rng& rng);

// Ancestral sampling of whole notes. The end-of-note token closes a note;
// sampling stops at the first note boundary at or after the target word
// count. Notes reaching max_note_length tokens are closed by force, and a
// note closed before its first token is discarded.
Corpus generate_corpus(const LanguageModel& model, const GenerationConfig& config);

// Splits a flat token list into sentences after ".", "!" and "?".
std::vector<Sentence> split_sentences(const std::vector<std::string>& tokens);

}  // namespace notesynth

#endif  // NOTESYNTH_GENERATE_H_
