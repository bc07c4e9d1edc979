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

#include "notesynth/count_models.h"

#include <cmath>

namespace notesynth {

UniformModel::UniformModel(Vocabulary vocab) : vocab_(std::move(vocab)) {
  if (vocab_.size() == 0) throw ConfigError("empty vocabulary");
}

Eigen::VectorXd UniformModel::next_log_distribution(
    std::span<const TokenId>) const {
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  return Eigen::VectorXd::Constant(v, -std::log(static_cast<double>(v)));
}

double UniformModel::log_prob(TokenId next, std::span<const TokenId>) const {
  check_token(next);
  return -std::log(static_cast<double>(vocab_.size()));
}

UnigramModel::UnigramModel(Vocabulary vocab, std::vector<std::uint64_t> counts)
    : vocab_(std::move(vocab)), counts_(std::move(counts)) {
  if (vocab_.size() == 0) throw ConfigError("empty vocabulary");
  if (counts_.size() != vocab_.size()) {
    throw ConfigError("unigram counts do not match the vocabulary");
  }
  for (auto c : counts_) total_ += c;
}

UnigramModel UnigramModel::train(const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<std::uint64_t> counts(vocab.size(), 0);
  const auto eon = vocab.end_of_note_id();
  for (const auto& note : corpus.notes) {
    for (TokenId id : vocab.encode(note)) ++counts[id];
    if (eon) ++counts[*eon];
  }
  return UnigramModel(vocab, std::move(counts));
}

double UnigramModel::log_prob(TokenId token) const {
  check_token(token);
  return std::log(static_cast<double>(counts_[token]) + 1.0) -
         std::log(static_cast<double>(total_ + vocab_.size()));
}

double UnigramModel::log_prob(TokenId next, std::span<const TokenId>) const {
  return log_prob(next);
}

Eigen::VectorXd UnigramModel::next_log_distribution(
    std::span<const TokenId>) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(vocab_.size()));
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = log_prob(static_cast<TokenId>(i));
  }
  return out;
}

std::vector<double> UnigramModel::score_note(
    std::span<const TokenId> note) const {
  std::vector<double> out;
  out.reserve(note.size());
  for (TokenId id : note) out.push_back(log_prob(id));
  return out;
}

BigramModel::BigramModel(Vocabulary vocab, PairCounts pair_counts)
    : vocab_(std::move(vocab)), pairs_(std::move(pair_counts)) {
  if (vocab_.size() == 0) throw ConfigError("empty vocabulary");
  context_totals_.assign(vocab_.size(), 0);
  const auto v = static_cast<TokenId>(vocab_.size());
  for (const auto& [key, count] : pairs_) {
    if (key.first < 0 || key.first >= v || key.second < 0 || key.second >= v) {
      throw ConfigError("bigram count outside the vocabulary");
    }
    context_totals_[key.first] += count;
  }
}

BigramModel BigramModel::train(const Corpus& corpus, const Vocabulary& vocab) {
  PairCounts pairs;
  const auto eon = vocab.end_of_note_id();
  for (const auto& note : corpus.notes) {
    const auto ids = vocab.encode(note);
    std::optional<TokenId> prev = eon;
    for (TokenId id : ids) {
      if (prev) ++pairs[{*prev, id}];
      prev = id;
    }
    if (eon && prev) ++pairs[{*prev, *eon}];
  }
  return BigramModel(vocab, std::move(pairs));
}

std::optional<TokenId> BigramModel::previous(
    std::span<const TokenId> context) const {
  if (!context.empty()) {
    check_token(context.back());
    return context.back();
  }
  return vocab_.end_of_note_id();
}

std::uint64_t BigramModel::pair_count(TokenId prev, TokenId next) const {
  auto it = pairs_.find({prev, next});
  return it == pairs_.end() ? 0 : it->second;
}

double BigramModel::log_prob(TokenId next,
                             std::span<const TokenId> context) const {
  check_token(next);
  const double v = static_cast<double>(vocab_.size());
  const auto prev = previous(context);
  if (!prev) return -std::log(v);
  return std::log(static_cast<double>(pair_count(*prev, next)) + 1.0) -
         std::log(static_cast<double>(context_totals_[*prev]) + v);
}

Eigen::VectorXd BigramModel::next_log_distribution(
    std::span<const TokenId> context) const {
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  const auto prev = previous(context);
  if (!prev) {
    return Eigen::VectorXd::Constant(v, -std::log(static_cast<double>(v)));
  }
  const double log_denominator =
      std::log(static_cast<double>(context_totals_[*prev]) + static_cast<double>(v));
  Eigen::VectorXd out = Eigen::VectorXd::Constant(v, -log_denominator);
  for (auto it = pairs_.lower_bound({*prev, 0});
       it != pairs_.end() && it->first.first == *prev; ++it) {
    out(it->first.second) =
        std::log(static_cast<double>(it->second) + 1.0) - log_denominator;
  }
  return out;
}

}  // namespace notesynth
