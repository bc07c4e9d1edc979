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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "notesynth/count_models.h"
#include "notesynth/language_model.h"
#include "notesynth/lstm_lm.h"
#include "notesynth/model_io.h"
#include "notesynth/rng.h"
#include "test_util.h"

namespace notesynth {
namespace {

using ::notesynth::testing::make_corpus;

TEST(UnigramTest, LidstoneFormula) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "b"});
  const UnigramModel m(v, {3, 1});
  EXPECT_NEAR(std::exp(m.log_prob(0)), 4.0 / 6.0, 1e-12);
  const UnigramModel unseen(v, {4, 0});
  EXPECT_NEAR(std::exp(unseen.log_prob(1)), 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(m.next_distribution({}).sum(), 1.0, 1e-12);
}

TEST(UnigramTest, OutOfVocabularyIdThrows) {
  const UnigramModel m(Vocabulary::from_tokens({"a", "b"}), {1, 1});
  const std::vector<TokenId> ctx;
  EXPECT_ANY_THROW(m.log_prob(5, ctx));
}

TEST(UnigramTest, TrainCountsTokens) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "b"});
  const auto m = UnigramModel::train(make_corpus({"a b", "b b"}), v);
  EXPECT_EQ(m.counts(), (std::vector<std::uint64_t>{1, 3}));
  EXPECT_EQ(m.total(), 4u);
}

TEST(PerplexityTest, HandComputedUnigram) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "b"});
  const auto m = UnigramModel::train(make_corpus({"a b", "b b"}), v);
  EXPECT_NEAR(perplexity(m, make_corpus({"b b"})), 1.5, 1e-12);
}

TEST(PerplexityTest, UniformEqualsVocabularySize) {
  std::vector<std::string> tokens;
  for (int i = 0; i < 10; ++i) tokens.push_back("w" + std::to_string(i));
  const UniformModel m(Vocabulary::from_tokens(tokens));
  EXPECT_NEAR(perplexity(m, make_corpus({"w1 w2 w3", "w9 w0"})), 10.0, 1e-9);
}

TEST(PerplexityTest, EmptyCorpusIsAnError) {
  const UniformModel m(Vocabulary::from_tokens({"a"}));
  EXPECT_THROW(perplexity(m, Corpus{}), ConfigError);
}

TEST(BigramTest, AddOneEstimate) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "b", "c", "<eon>"});
  const auto m = BigramModel::train(make_corpus({"a b a b", "a c"}), v);
  const std::vector<TokenId> ctx = {0};
  // c(a, b) = 2, c(a) = 3.
  EXPECT_NEAR(std::exp(m.log_prob(1, ctx)), 3.0 / (3.0 + 4.0), 1e-12);
  // Note start conditions on <eon>: c(<eon>, a) = 2 of 2.
  EXPECT_NEAR(std::exp(m.log_prob(0, {})), 3.0 / (2.0 + 4.0), 1e-12);
}

TEST(BigramTest, WithoutEndOfNoteStartIsUniform) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "b", "c"});
  const auto m = BigramModel::train(make_corpus({"a b"}), v);
  EXPECT_NEAR(std::exp(m.log_prob(2, {})), 1.0 / 3.0, 1e-12);
}

class NormalizationTest : public ::testing::TestWithParam<std::string> {};

TEST_P(NormalizationTest, DistributionsSumToOne) {
  const Vocabulary v =
      Vocabulary::from_tokens({"<unk>", "a", "b", "c", "d", "<eon>"});
  const Corpus train = make_corpus({"a b c", "d a a b", "c c d"});
  ModelPtr model;
  if (GetParam() == "unigram") {
    model = std::make_shared<UnigramModel>(UnigramModel::train(train, v));
  } else if (GetParam() == "bigram") {
    model = std::make_shared<BigramModel>(BigramModel::train(train, v));
  } else {
    LstmLmConfig cfg;
    cfg.hidden_size = 8;
    cfg.epochs = 2;
    cfg.bptt = 5;
    cfg.batch_size = 2;
    model = std::make_shared<LstmModel>(train_lstm_lm(train, train, v, cfg));
  }
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TokenId> ctx(rng.below(6));
    for (auto& t : ctx) t = static_cast<TokenId>(rng.below(v.size()));
    const Eigen::VectorXd p = model->next_distribution(ctx);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    EXPECT_GT(p.minCoeff(), 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Models, NormalizationTest,
                         ::testing::Values("unigram", "bigram", "lstm"));

TEST(UnigramTest, IgnoresContext) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "b", "c"});
  const UnigramModel m(v, {5, 2, 0});
  const std::vector<TokenId> c1 = {0, 1};
  const std::vector<TokenId> c2 = {2};
  EXPECT_EQ(m.next_log_distribution(c1), m.next_log_distribution(c2));
}

TEST(ScoreNoteTest, MatchesLogProbPerPosition) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "b", "<eon>"});
  const auto m = BigramModel::train(make_corpus({"a b b", "b a"}), v);
  const std::vector<TokenId> note = {1, 0, 0, 1};
  const auto scores = m.score_note(note);
  ASSERT_EQ(scores.size(), note.size());
  for (std::size_t i = 0; i < note.size(); ++i) {
    const std::span<const TokenId> ctx(note.data(), i);
    EXPECT_NEAR(scores[i], m.log_prob(note[i], ctx), 1e-12);
  }
}

TEST(ModelIoTest, CountModelsRoundTrip) {
  const Vocabulary v = Vocabulary::from_tokens({"<unk>", "a", "b", "<eon>"},
                                               {0, 3, 2, 0}, 2);
  const Corpus train = make_corpus({"a b a", "b a"});
  const std::vector<ModelPtr> models = {
      std::make_shared<UniformModel>(v),
      std::make_shared<UnigramModel>(UnigramModel::train(train, v)),
      std::make_shared<BigramModel>(BigramModel::train(train, v))};
  for (const auto& m : models) {
    const std::string bytes = model_to_bytes(*m);
    std::istringstream in(bytes);
    const ModelPtr back = load_model(in);
    EXPECT_EQ(back->kind(), m->kind());
    EXPECT_EQ(back->vocabulary(), m->vocabulary());
    EXPECT_EQ(model_to_bytes(*back), bytes);
    const std::vector<TokenId> ctx = {1};
    EXPECT_EQ(back->next_log_distribution(ctx), m->next_log_distribution(ctx));
  }
}

TEST(ModelIoTest, LstmRoundTripIsExact) {
  const Vocabulary v = Vocabulary::from_tokens({"<unk>", "a", "b", "<eon>"});
  LstmLmConfig cfg;
  cfg.hidden_size = 6;
  cfg.epochs = 1;
  cfg.bptt = 4;
  const Corpus train = make_corpus({"a b a", "b a b b"});
  const LstmModel m = train_lstm_lm(train, train, v, cfg);
  const std::string bytes = model_to_bytes(m);
  EXPECT_EQ(bytes.substr(0, 4), "PTLM");
  std::istringstream in(bytes);
  const ModelPtr back = load_model(in);
  EXPECT_EQ(model_to_bytes(*back), bytes);
  const std::vector<TokenId> note = {1, 2, 1};
  EXPECT_EQ(back->score_note(note), m.score_note(note));
}

TEST(ModelIoTest, RejectsBadMagic) {
  std::istringstream in("XXXX0000");
  EXPECT_THROW(load_model(in), FormatError);
}

}  // namespace
}  // namespace notesynth
