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

#ifndef NOTESYNTH_TRUECASE_H_
#define NOTESYNTH_TRUECASE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "notesynth/char_tagger.h"
#include "notesynth/corpus.h"

namespace notesynth {

// Gold-cased sentence and its lowercased copy, token aligned.
struct CasePair {
  Sentence cased;
  Sentence lowered;
};

std::vector<CasePair> make_case_pairs(const Corpus& corpus);

// Two parallel canonical corpus files: cased and lowered. Throws FormatError
// when they are not token aligned or the lowered side is not the lowercase of
// the cased side.
std::vector<CasePair> read_case_pairs(const std::string& cased_path,
                                      const std::string& lowered_path);
void write_case_pairs(const Corpus& cased, const std::string& cased_path,
                      const std::string& lowered_path);

struct TruecaserConfig {
  CharTaggerConfig tagger;
  // Training uses at most this many sentences (0 = all), taken in corpus order.
  std::size_t max_sentences = 0;
};

// Per-character {lower, upper} tagger over space-joined lowercased sentences.
class Truecaser {
 public:
  explicit Truecaser(CharTagger tagger) : tagger_(std::move(tagger)) {}

  // Only ASCII letters may change, and only in case.
  Sentence restore(const Sentence& lowered) const;
  std::vector<Sentence> restore(const std::vector<Sentence>& lowered) const;

  const CharTagger& tagger() const { return tagger_; }

 private:
  CharTagger tagger_;
};

Truecaser train_truecaser(const Corpus& train, const TruecaserConfig& config);

struct CaseScore {
  std::size_t true_positives = 0;
  std::size_t predicted_positives = 0;
  std::size_t gold_positives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Word-level F1. A token is positive when it has an uppercase letter; a true
// positive also matches the gold token exactly.
CaseScore case_f1(const std::vector<Sentence>& gold,
                  const std::vector<Sentence>& predicted);

CaseScore evaluate_truecase(const Truecaser& caser,
                            const std::vector<CasePair>& test);

}  // namespace notesynth

#endif  // NOTESYNTH_TRUECASE_H_
