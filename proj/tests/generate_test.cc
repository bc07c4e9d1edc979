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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "notesynth/count_models.h"
#include "notesynth/model_io.h"
#include "test_util.h"

namespace notesynth {
namespace {

using ::notesynth::testing::make_corpus;

// Emits tokens 0, 1, 2, ... and closes the note after `length` of them.
class CycleModel final : public LanguageModel {
 public:
  CycleModel(Vocabulary vocab, std::size_t length)
      : vocab_(std::move(vocab)), length_(length) {}

  std::string kind() const override { return "cycle"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  Eigen::VectorXd next_log_distribution(
      std::span<const TokenId> context) const override {
    Eigen::VectorXd lp = Eigen::VectorXd::Constant(
        static_cast<Eigen::Index>(vocab_.size()), -50.0);
    const TokenId next = context.size() >= length_
                             ? *vocab_.end_of_note_id()
                             : static_cast<TokenId>(context.size() % 3);
    lp(next) = 0.0;
    return lp;
  }

 private:
  Vocabulary vocab_;
  std::size_t length_;
};

Vocabulary abc_vocabulary() {
  return Vocabulary::from_tokens({"a", "b", "."}).with_end_of_note();
}

TEST(SampleNextTest, ZeroTemperatureIsArgmax) {
  Rng rng(1);
  const Eigen::VectorXd lp = Eigen::Vector3d(0.2, 0.7, 0.1).array().log();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_next(lp, 0.0, rng), 1);
}

TEST(SampleNextTest, FairCoinIsWithinBinomialBound) {
  Rng rng(2);
  const Eigen::VectorXd lp = Eigen::Vector2d(0.5, 0.5).array().log();
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += sample_next(lp, 1.0, rng);
  EXPECT_NEAR(ones, 5000, 200);
}

TEST(SampleNextTest, ReproducibleUnderSeed) {
  const Eigen::VectorXd lp = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4).array().log();
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(sample_next(lp, 1.0, a), sample_next(lp, 1.0, b));
}

TEST(SampleNextTest, HighTemperatureFlattens) {
  Rng rng(3);
  const Eigen::VectorXd lp = Eigen::Vector2d(0.9, 0.1).array().log();
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += sample_next(lp, 1e6, rng);
  EXPECT_NEAR(ones, 5000, 200);
}

TEST(SampleNextTest, NegativeTemperatureIsAConfigError) {
  Rng rng(1);
  EXPECT_THROW(sample_next(Eigen::Vector2d(0.0, 0.0), -1.0, rng), ConfigError);
}

TEST(GenerateCorpusTest, StopsAtTargetWordCount) {
  const CycleModel model(abc_vocabulary(), 10);
  GenerationConfig cfg;
  cfg.target_word_count = 100;
  const Corpus c = generate_corpus(model, cfg);
  EXPECT_EQ(c.word_count(), 100u);
  EXPECT_EQ(c.notes.size(), 10u);
}

TEST(GenerateCorpusTest, RespectsMaxNoteLength) {
  const CycleModel model(abc_vocabulary(), 1000);
  GenerationConfig cfg;
  cfg.target_word_count = 50;
  cfg.max_note_length = 7;
  const Corpus c = generate_corpus(model, cfg);
  for (const auto& note : c.notes) EXPECT_LE(note.word_count(), 7u);
}

TEST(GenerateCorpusTest, SameSeedGivesIdenticalFile) {
  const Corpus train = make_corpus({"a b a .", "b b .", "a ."});
  const Vocabulary vocab = build_vocabulary(train, 1).with_end_of_note();
  const UnigramModel model = UnigramModel::train(train, vocab);
  GenerationConfig cfg;
  cfg.target_word_count = 500;
  cfg.seed = 11;
  const std::string a = corpus_to_string(generate_corpus(model, cfg));
  EXPECT_EQ(a, corpus_to_string(generate_corpus(model, cfg)));
  cfg.seed = 12;
  EXPECT_NE(a, corpus_to_string(generate_corpus(model, cfg)));
}

TEST(GenerateCorpusTest, OutputRoundTripsThroughCorpusFormat) {
  const Corpus train = make_corpus({"a b a .", "b b .", "a ."});
  const Vocabulary vocab = build_vocabulary(train, 1).with_end_of_note();
  const UnigramModel model = UnigramModel::train(train, vocab);
  GenerationConfig cfg;
  cfg.target_word_count = 300;
  const Corpus c = generate_corpus(model, cfg);
  std::istringstream in(corpus_to_string(c));
  EXPECT_EQ(corpus_to_string(read_corpus(in)), corpus_to_string(c));
}

TEST(GenerateCorpusTest, ModelIsUnchangedByGeneration) {
  const Corpus train = make_corpus({"a b a .", "b b ."});
  const Vocabulary vocab = build_vocabulary(train, 1).with_end_of_note();
  const UnigramModel model = UnigramModel::train(train, vocab);
  const std::string before = model_to_bytes(model);
  GenerationConfig cfg;
  cfg.target_word_count = 100;
  generate_corpus(model, cfg);
  EXPECT_EQ(model_to_bytes(model), before);
}

TEST(GenerateCorpusTest, UnigramFrequenciesMatchModel) {
  const Corpus train = make_corpus({"a b c . a a b", "d . a b", "c c a ."});
  const Vocabulary vocab = build_vocabulary(train, 1).with_end_of_note();
  const UnigramModel model = UnigramModel::train(train, vocab);
  GenerationConfig cfg;
  cfg.target_word_count = 1000000;
  cfg.seed = 3;
  const Corpus c = generate_corpus(model, cfg);

  const TokenId eon = *vocab.end_of_note_id();
  Eigen::VectorXd expected = model.next_distribution({});
  expected(eon) = 0.0;
  expected /= expected.sum();
  Eigen::VectorXd observed = Eigen::VectorXd::Zero(expected.size());
  for (const auto& note : c.notes) {
    for (TokenId id : vocab.encode(note)) observed(id) += 1.0;
  }
  observed /= observed.sum();
  EXPECT_LT((observed - expected).lpNorm<1>(), 0.02);
}

TEST(GenerateCorpusTest, RequiresEndOfNoteToken) {
  const Corpus train = make_corpus({"a b"});
  const UnigramModel model = UnigramModel::train(train, build_vocabulary(train, 1));
  EXPECT_THROW(generate_corpus(model, GenerationConfig{}), ConfigError);
}

TEST(SplitSentencesTest, BreaksAfterTerminators) {
  const auto s = split_sentences({"a", ".", "b", "c", "?", "d"});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (Sentence{"a", "."}));
  EXPECT_EQ(s[1], (Sentence{"b", "c", "?"}));
  EXPECT_EQ(s[2], (Sentence{"d"}));
}

}  // namespace
}  // namespace notesynth
