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

#ifndef NOTESYNTH_TESTS_ORACLES_H_
#define NOTESYNTH_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "notesynth/corpus.h"
#include "notesynth/count_models.h"
#include "notesynth/language_model.h"
#include "notesynth/rng.h"

namespace notesynth::testing {

// Leave-one-out score of note `k` under a Lidstone unigram over a vocabulary
// of `vocab_size` types, computed from raw token counts.
inline double unigram_loo_closed_form(const std::vector<std::vector<std::string>>& notes,
                                      std::size_t k, std::size_t vocab_size) {
  std::map<std::string, double> all;
  double n = 0.0;
  for (const auto& note : notes) {
    for (const auto& w : note) {
      all[w] += 1.0;
      n += 1.0;
    }
  }
  std::map<std::string, double> own;
  for (const auto& w : notes[k]) own[w] += 1.0;
  const double v = static_cast<double>(vocab_size);
  const double n_loo = n - static_cast<double>(notes[k].size());
  double best = 0.0;
  for (const auto& [w, c] : own) {
    const double full = std::log((all[w] + 1.0) / (n + v));
    const double loo = std::log((all[w] - c + 1.0) / (n_loo + v));
    best = std::max(best, std::abs(full - loo));
  }
  return best;
}

// Notes of 1 to 8 tokens drawn from a small alphabet.
inline std::vector<std::vector<std::string>> random_token_notes(Rng& rng,
                                                                std::size_t count) {
  static const std::vector<std::string> kAlphabet = {"a", "b", "c", "d", "e", "f"};
  std::vector<std::vector<std::string>> notes(count);
  for (auto& note : notes) {
    const std::size_t len = 1 + rng.below(8);
    for (std::size_t i = 0; i < len; ++i) note.push_back(kAlphabet[rng.below(kAlphabet.size())]);
  }
  return notes;
}

inline Corpus corpus_from_tokens(const std::vector<std::vector<std::string>>& notes) {
  Corpus c;
  for (std::size_t i = 0; i < notes.size(); ++i) {
    Note n;
    n.id = "note-" + std::to_string(i);
    n.sentences.push_back(notes[i]);
    c.notes.push_back(std::move(n));
  }
  return c;
}

// Unigram trainer over a fixed vocabulary.
inline LmTrainer unigram_trainer(const Vocabulary& vocab) {
  return [vocab](const Corpus& train) -> ModelPtr {
    return std::make_shared<UnigramModel>(UnigramModel::train(train, vocab));
  };
}

inline LmTrainer uniform_trainer(const Vocabulary& vocab) {
  return [vocab](const Corpus&) -> ModelPtr {
    return std::make_shared<UniformModel>(vocab);
  };
}

// The two-note corpus {"a b", "b b"} over the vocabulary {a, b}.
inline Corpus two_note_corpus() {
  return corpus_from_tokens({{"a", "b"}, {"b", "b"}});
}

inline Vocabulary two_note_vocabulary() { return Vocabulary::from_tokens({"a", "b"}); }

}  // namespace notesynth::testing

#endif  // NOTESYNTH_TESTS_ORACLES_H_
