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

#ifndef NOTESYNTH_COUNT_MODELS_H_
#define NOTESYNTH_COUNT_MODELS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "notesynth/language_model.h"

namespace notesynth {

// Data-independent model: every token has probability 1/|V|.
class UniformModel final : public LanguageModel {
 public:
  explicit UniformModel(Vocabulary vocab);

  std::string kind() const override { return "uniform"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  Eigen::VectorXd next_log_distribution(
      std::span<const TokenId> context) const override;
  double log_prob(TokenId next, std::span<const TokenId> context) const override;

 private:
  Vocabulary vocab_;
};

// Add-one (Lidstone) unigram: p(u) = (count(u) + 1) / (N + |V|).
//
// Training counts every note token; when the vocabulary has an end-of-note
// entry, one end-of-note is counted after each note.
class UnigramModel final : public LanguageModel {
 public:
  UnigramModel(Vocabulary vocab, std::vector<std::uint64_t> counts);

  static UnigramModel train(const Corpus& corpus, const Vocabulary& vocab);

  std::string kind() const override { return "unigram"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  Eigen::VectorXd next_log_distribution(
      std::span<const TokenId> context) const override;
  double log_prob(TokenId next, std::span<const TokenId> context) const override;
  std::vector<double> score_note(std::span<const TokenId> note) const override;

  double log_prob(TokenId token) const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }

 private:
  Vocabulary vocab_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// Add-one bigram: p(u | v) = (count(v, u) + 1) / (count(v, .) + |V|), with no
// backoff. The context of the first token of a note is the end-of-note token
// when the vocabulary has one; otherwise it is an unseen context (uniform).
class BigramModel final : public LanguageModel {
 public:
  using PairCounts = std::map<std::pair<TokenId, TokenId>, std::uint64_t>;

  BigramModel(Vocabulary vocab, PairCounts pair_counts);

  static BigramModel train(const Corpus& corpus, const Vocabulary& vocab);

  std::string kind() const override { return "bigram"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  Eigen::VectorXd next_log_distribution(
      std::span<const TokenId> context) const override;
  double log_prob(TokenId next, std::span<const TokenId> context) const override;

  const PairCounts& pair_counts() const { return pairs_; }

 private:
  std::optional<TokenId> previous(std::span<const TokenId> context) const;
  std::uint64_t pair_count(TokenId prev, TokenId next) const;

  Vocabulary vocab_;
  PairCounts pairs_;
  std::vector<std::uint64_t> context_totals_;
};

}  // namespace notesynth

#endif  // NOTESYNTH_COUNT_MODELS_H_
