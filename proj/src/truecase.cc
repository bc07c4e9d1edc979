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

#include "notesynth/truecase.h"

#include <algorithm>
#include <cctype>

#include "notesynth/common.h"

namespace notesynth {
namespace {

bool has_upper(const std::string& token) {
  return std::any_of(token.begin(), token.end(),
                     [](unsigned char c) { return c >= 'A' && c <= 'Z'; });
}

std::string join(const Sentence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<Sentence> all_sentences(const Corpus& corpus) {
  std::vector<Sentence> out;
  for (const auto& note : corpus.notes) {
    for (const auto& s : note.sentences) out.push_back(s);
  }
  return out;
}

Sentence lower_sentence(const Sentence& s) {
  Sentence out;
  out.reserve(s.size());
  for (const auto& t : s) out.push_back(ascii_lower(t));
  return out;
}

}  // namespace

std::vector<CasePair> make_case_pairs(const Corpus& corpus) {
  std::vector<CasePair> pairs;
  for (auto& s : all_sentences(corpus)) {
    Sentence lowered = lower_sentence(s);
    pairs.push_back({std::move(s), std::move(lowered)});
  }
  return pairs;
}

std::vector<CasePair> read_case_pairs(const std::string& cased_path,
                                      const std::string& lowered_path) {
  const auto cased = all_sentences(read_corpus_file(cased_path));
  const auto lowered = all_sentences(read_corpus_file(lowered_path));
  if (cased.size() != lowered.size()) {
    throw FormatError("case pairs: sentence counts differ (" +
                      std::to_string(cased.size()) + " vs " +
                      std::to_string(lowered.size()) + ")");
  }
  std::vector<CasePair> pairs;
  pairs.reserve(cased.size());
  for (std::size_t i = 0; i < cased.size(); ++i) {
    if (lower_sentence(cased[i]) != lowered[i]) {
      throw FormatError("case pairs: sentence " + std::to_string(i + 1) +
                        " is not aligned with its lowercase form");
    }
    pairs.push_back({cased[i], lowered[i]});
  }
  return pairs;
}

void write_case_pairs(const Corpus& cased, const std::string& cased_path,
                      const std::string& lowered_path) {
  Corpus lowered = cased;
  for (auto& note : lowered.notes) {
    for (auto& s : note.sentences) s = lower_sentence(s);
  }
  write_corpus_file(cased_path, cased);
  write_corpus_file(lowered_path, lowered);
}

Sentence Truecaser::restore(const Sentence& lowered) const {
  return restore(std::vector<Sentence>{lowered}).front();
}

std::vector<Sentence> Truecaser::restore(
    const std::vector<Sentence>& lowered) const {
  std::vector<std::string> inputs;
  inputs.reserve(lowered.size());
  for (const auto& s : lowered) inputs.push_back(join(s));
  const auto labels = tagger_.predict(inputs);

  std::vector<Sentence> out;
  out.reserve(lowered.size());
  for (std::size_t i = 0; i < lowered.size(); ++i) {
    Sentence restored = lowered[i];
    std::size_t pos = 0;
    for (auto& token : restored) {
      for (char& c : token) {
        if (c >= 'a' && c <= 'z' && labels[i][pos] == 1) c = c - 'a' + 'A';
        ++pos;
      }
      ++pos;  // separator
    }
    out.push_back(std::move(restored));
  }
  return out;
}

Truecaser train_truecaser(const Corpus& train, const TruecaserConfig& config) {
  if (config.tagger.num_labels != 2) {
    throw ConfigError("truecaser: tagger must have 2 labels");
  }
  std::vector<std::string> inputs;
  std::vector<std::vector<int>> labels;
  for (const auto& s : all_sentences(train)) {
    if (config.max_sentences && inputs.size() >= config.max_sentences) break;
    const std::string cased = join(s);
    std::vector<int> y(cased.size());
    for (std::size_t i = 0; i < cased.size(); ++i) {
      y[i] = (cased[i] >= 'A' && cased[i] <= 'Z') ? 1 : 0;
    }
    inputs.push_back(ascii_lower(cased));
    labels.push_back(std::move(y));
  }
  return Truecaser(train_char_classifier(inputs, labels, config.tagger));
}

CaseScore case_f1(const std::vector<Sentence>& gold,
                  const std::vector<Sentence>& predicted) {
  if (gold.size() != predicted.size()) {
    throw ConfigError("case f1: sentence counts differ");
  }
  CaseScore score;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != predicted[i].size()) {
      throw ConfigError("case f1: sentence " + std::to_string(i + 1) +
                        " is not token aligned");
    }
    for (std::size_t j = 0; j < gold[i].size(); ++j) {
      const bool g = has_upper(gold[i][j]);
      const bool p = has_upper(predicted[i][j]);
      score.gold_positives += g;
      score.predicted_positives += p;
      score.true_positives += g && predicted[i][j] == gold[i][j];
    }
  }
  if (score.gold_positives == 0 && score.predicted_positives == 0) {
    score.precision = score.recall = score.f1 = 1.0;
    return score;
  }
  const double tp = static_cast<double>(score.true_positives);
  if (score.predicted_positives) {
    score.precision = tp / static_cast<double>(score.predicted_positives);
  }
  if (score.gold_positives) {
    score.recall = tp / static_cast<double>(score.gold_positives);
  }
  if (score.precision + score.recall > 0.0) {
    score.f1 = 2.0 * score.precision * score.recall /
               (score.precision + score.recall);
  }
  return score;
}

CaseScore evaluate_truecase(const Truecaser& caser,
                            const std::vector<CasePair>& test) {
  std::vector<Sentence> gold;
  std::vector<Sentence> lowered;
  gold.reserve(test.size());
  lowered.reserve(test.size());
  for (const auto& p : test) {
    gold.push_back(p.cased);
    lowered.push_back(p.lowered);
  }
  return case_f1(gold, caser.restore(lowered));
}

}  // namespace notesynth
