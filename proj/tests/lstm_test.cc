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

#include "notesynth/lstm_lm.h"

#include <gtest/gtest.h>

#include <cmath>

#include "grad_check.h"
#include "notesynth/char_tagger.h"
#include "notesynth/model_io.h"
#include "test_util.h"

namespace notesynth {
namespace {

using ::notesynth::testing::make_corpus;
using ::notesynth::testing::make_lstm_check;
using ::notesynth::testing::run_lstm_check;

TEST(LstmForwardTest, ZeroWeightsGiveUniformDistribution) {
  const auto params = nn::LstmLmParams<double>::zeros(7, 4, 2);
  auto state = nn::LmState<double>::zeros(params, 2);
  const nn::TokenBatch inputs{3, 2, {0, 1, 2, 3, 4, 5}};
  const auto lp = nn::lstm_forward(params, inputs, state, nn::Dropout{});
  EXPECT_TRUE(lp.isApprox(nn::Matrix<double>::Constant(7, 6, -std::log(7.0))));
}

TEST(LstmForwardTest, RejectsOutOfRangeIds) {
  const auto params = nn::LstmLmParams<double>::zeros(3, 2, 1);
  auto state = nn::LmState<double>::zeros(params, 1);
  EXPECT_THROW(nn::lstm_forward(params, nn::TokenBatch{1, 1, {3}}, state,
                                nn::Dropout{}),
               std::invalid_argument);
}

TEST(LstmForwardTest, ResetMatchesFreshState) {
  auto setup = make_lstm_check(6, 5, 2, 4, 1, 8);
  const TokenId reset = 5;
  setup.inputs.ids = {1, 2, reset, 3};
  setup.inputs.reset_token = reset;
  auto state = nn::LmState<double>::zeros(setup.params, 1);
  const auto full = nn::lstm_forward(setup.params, setup.inputs, state, nn::Dropout{});
  auto fresh = nn::LmState<double>::zeros(setup.params, 1);
  const auto tail = nn::lstm_forward(setup.params, nn::TokenBatch{2, 1, {reset, 3}},
                                     fresh, nn::Dropout{});
  EXPECT_TRUE(full.rightCols(2).isApprox(tail, 1e-14));
}

TEST(LstmGradientTest, EveryGroupMatchesFiniteDifferences) {
  auto setup = make_lstm_check(12, 8, 2, 7, 2, 1);
  const auto r = run_lstm_check(setup, 10, true, 2);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst;
}

TEST(LstmGradientTest, WithFixedDropoutMasks) {
  auto setup = make_lstm_check(12, 8, 2, 7, 2, 3);
  setup.dropout = 0.3;
  const auto r = run_lstm_check(setup, 10, true, 4);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst;
}

TEST(LstmGradientTest, AcrossStateResets) {
  auto setup = make_lstm_check(12, 8, 2, 7, 2, 5);
  setup.inputs.reset_token = 11;
  setup.inputs.ids[4] = 11;
  setup.inputs.ids[9] = 11;
  const auto r = run_lstm_check(setup, 10, true, 6);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst;
}

TEST(LstmGradientTest, NoTargetsGiveZeroLossAndGradient) {
  auto setup = make_lstm_check(5, 3, 2, 4, 1, 7);
  setup.targets.assign(setup.targets.size(), -1);
  auto grads = setup.params.zeros_like();
  EXPECT_EQ(setup.loss(&grads), 0.0);
  for (auto& [name, g] : grads.tensors()) EXPECT_EQ(g->squaredNorm(), 0.0) << name;
}

TEST(LstmGradientTest, SmallStepDecreasesLoss) {
  auto setup = make_lstm_check(12, 8, 2, 7, 2, 9);
  auto grads = setup.params.zeros_like();
  const double before = setup.loss(&grads);
  auto p = setup.params.tensors();
  auto g = grads.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) *p[k].second -= 1e-3 * *g[k].second;
  EXPECT_LT(setup.loss(nullptr), before);
}

TEST(ClipTest, GlobalNormIsBounded) {
  auto setup = make_lstm_check(12, 8, 2, 7, 2, 10);
  auto grads = setup.params.zeros_like();
  setup.loss(&grads);
  for (auto& [name, g] : grads.tensors()) *g *= 100.0;
  const auto tensors = grads.tensors();
  const double before = nn::clip_global_norm(tensors, 0.25);
  EXPECT_GT(before, 0.25);
  EXPECT_LE(nn::global_norm(tensors), 0.25 + 1e-12);
}

TEST(LrScheduleTest, MedText2DividesByFourWithoutImprovement) {
  LrSchedule s(LrPolicy::kMedText2, 20.0);
  s.observe(5.0);
  EXPECT_EQ(s.lr(), 20.0);
  s.observe(4.0);
  EXPECT_EQ(s.lr(), 20.0);
  s.observe(4.0);
  EXPECT_EQ(s.lr(), 5.0);
  s.observe(4.5);
  EXPECT_EQ(s.lr(), 1.25);
}

TEST(LrScheduleTest, MedText103DividesUnlessImprovedByOneTenth) {
  LrSchedule s(LrPolicy::kMedText103, 20.0);
  EXPECT_EQ(s.checks_per_epoch(), 40);
  s.observe(5.0);
  s.observe(4.95);
  EXPECT_DOUBLE_EQ(s.lr(), 20.0 / 1.2);
  s.observe(4.5);
  EXPECT_DOUBLE_EQ(s.lr(), 20.0 / 1.2);
  for (int i = 0; i < 200; ++i) s.observe(4.5);
  EXPECT_DOUBLE_EQ(s.lr(), 0.1);
}

TEST(LstmConfigTest, DropoutOfOneIsAConfigError) {
  LstmLmConfig c;
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.dropout = 0.5;
  EXPECT_NO_THROW(c.validate());
  c.tied_embeddings = false;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(LstmParamsTest, TiedEmbeddingIsStoredOnce) {
  auto p = nn::LstmLmParams<double>::init(10, 4, 2, 1);
  const auto names = p.tensors();
  int embeddings = 0;
  for (const auto& [name, t] : names) embeddings += name == "embedding";
  EXPECT_EQ(embeddings, 1);
  EXPECT_EQ(names.size(), 1u + 3u * 2u + 1u);
  // Changing a column changes both the input lookup and the output logits.
  auto state = nn::LmState<double>::zeros(p, 1);
  const auto before = nn::lstm_forward(p, nn::TokenBatch{1, 1, {3}}, state, nn::Dropout{});
  p.embedding.col(5).setConstant(0.7);
  state = nn::LmState<double>::zeros(p, 1);
  const auto after = nn::lstm_forward(p, nn::TokenBatch{1, 1, {3}}, state, nn::Dropout{});
  EXPECT_NE(before(5, 0), after(5, 0));
}

class LstmTrainingTest : public ::testing::Test {
 protected:
  Corpus corpus_ = make_corpus({"the patient was seen in clinic and is well .",
                                "no acute distress was noted in clinic today .",
                                "the patient is well and was seen today ."});
  Vocabulary vocab_ = build_vocabulary(corpus_, 1).with_end_of_note();
};

TEST_F(LstmTrainingTest, DeterministicUnderSeed) {
  LstmLmConfig cfg;
  cfg.hidden_size = 8;
  cfg.epochs = 3;
  cfg.bptt = 6;
  cfg.dropout = 0.3;
  const auto a = train_lstm_lm(corpus_, corpus_, vocab_, cfg);
  const auto b = train_lstm_lm(corpus_, corpus_, vocab_, cfg);
  EXPECT_EQ(model_to_bytes(a), model_to_bytes(b));
  cfg.seed = 2;
  const auto c = train_lstm_lm(corpus_, corpus_, vocab_, cfg);
  EXPECT_NE(model_to_bytes(a), model_to_bytes(c));
}

TEST_F(LstmTrainingTest, LogsEveryEpoch) {
  LstmLmConfig cfg;
  cfg.hidden_size = 8;
  cfg.epochs = 4;
  std::vector<EpochLog> log;
  train_lstm_lm(corpus_, corpus_, vocab_, cfg, &log);
  ASSERT_EQ(log.size(), 4u);
  for (const auto& e : log) EXPECT_TRUE(std::isfinite(e.valid_perplexity));
}

TEST_F(LstmTrainingTest, RequiresEndOfNoteToken) {
  LstmLmConfig cfg;
  cfg.hidden_size = 4;
  EXPECT_THROW(train_lstm_lm(corpus_, corpus_, build_vocabulary(corpus_, 1), cfg),
               ConfigError);
}

TEST(LstmMemorizationTest, RepeatedSentenceReachesLowPerplexity) {
  const Corpus corpus = make_corpus(std::vector<std::string>(
      20, "the patient was seen in clinic and is well ."));
  const Vocabulary vocab = build_vocabulary(corpus, 1).with_end_of_note();
  LstmLmConfig cfg;
  cfg.hidden_size = 32;
  cfg.epochs = 200;
  cfg.batch_size = 1;
  const auto m = train_lstm_lm(corpus, corpus, vocab, cfg);
  EXPECT_LT(perplexity(m, corpus), 1.3);
}

TEST_F(LstmTrainingTest, BatchedScoringMatchesDecoder) {
  LstmLmConfig cfg;
  cfg.hidden_size = 8;
  cfg.epochs = 2;
  const auto m = train_lstm_lm(corpus_, corpus_, vocab_, cfg);
  const auto notes = encode_notes(corpus_, vocab_);
  const auto batched = m.score_notes(notes);
  for (std::size_t n = 0; n < notes.size(); ++n) {
    auto decoder = m.start_note();
    for (std::size_t i = 0; i < notes[n].size(); ++i) {
      EXPECT_NEAR(batched[n][i], decoder->log_distribution()(notes[n][i]), 1e-12);
      decoder->push(notes[n][i]);
    }
  }
}

TEST(CharTaggerTest, GradientMatchesFiniteDifferences) {
  CharTaggerConfig cfg;
  cfg.embedding_dim = 4;
  cfg.hidden_size = 5;
  cfg.num_labels = 3;
  auto params = nn::CharTaggerParams::init(cfg);
  Rng rng(4);
  for (auto& [name, t] : params.tensors()) nn::fill_uniform(*t, rng, -0.5, 0.5);
  const std::vector<std::string> inputs = {"abc d", "xy", "hello"};
  const std::vector<std::vector<int>> labels = {
      {0, 1, 2, 0, 1}, {2, 2}, {1, 0, 0, 2, 1}};
  auto grads = params.zeros_like();
  nn::char_tagger_loss_gradient(params, inputs, labels, grads);
  const auto r = testing::check_gradients(
      params, grads,
      [&] {
        auto scratch = params.zeros_like();
        return nn::char_tagger_loss_gradient(params, inputs, labels, scratch);
      },
      8, true, 5);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst;
}

TEST(CharTaggerTest, MemorizesSinglePair) {
  CharTaggerConfig cfg;
  cfg.epochs = 60;
  const std::vector<std::string> inputs = {"seen by dr nguyen"};
  std::vector<std::vector<int>> labels(1, std::vector<int>(inputs[0].size(), 0));
  labels[0][11] = 1;
  const CharTagger tagger = train_char_classifier(inputs, labels, cfg);
  EXPECT_EQ(tagger.predict(inputs[0]), labels[0]);
}

TEST(CharTaggerTest, DeterministicUnderSeed) {
  CharTaggerConfig cfg;
  cfg.epochs = 2;
  const std::vector<std::string> inputs = {"abc", "de"};
  const std::vector<std::vector<int>> labels = {{0, 1, 0}, {1, 1}};
  auto a = train_char_classifier(inputs, labels, cfg);
  auto b = train_char_classifier(inputs, labels, cfg);
  EXPECT_EQ(a.label_distributions("abcde"), b.label_distributions("abcde"));
}

TEST(CharTaggerTest, LearnsVowels) {
  CharTaggerConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 4;
  std::vector<std::string> inputs = {"banana", "kiwi", "apple", "grape",
                                     "melon", "peach", "plum", "cherry"};
  std::vector<std::vector<int>> labels;
  for (const auto& w : inputs) {
    std::vector<int> y;
    for (char c : w) y.push_back(std::string("aeiou").find(c) != std::string::npos);
    labels.push_back(y);
  }
  const CharTagger tagger = train_char_classifier(inputs, labels, cfg);
  EXPECT_EQ(tagger.predict(inputs), labels);
  const Eigen::MatrixXd dist = tagger.label_distributions("kiwi");
  EXPECT_TRUE(dist.colwise().sum().isApproxToConstant(1.0, 1e-12));
}

}  // namespace
}  // namespace notesynth
