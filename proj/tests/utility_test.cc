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
#include <functional>
#include <sstream>

#include "notesynth/nli.h"
#include "notesynth/rng.h"
#include "notesynth/truecase.h"
#include "test_util.h"

namespace notesynth {
namespace {

using ::notesynth::testing::make_corpus;

Sentence words(const std::string& text) { return make_corpus({text}).notes[0].sentences[0]; }

TEST(CaseF1Test, HandComputedCase) {
  const auto s = case_f1({words("John saw Mary")}, {words("john saw Mary")});
  EXPECT_EQ(s.true_positives, 1u);
  EXPECT_NEAR(s.precision, 1.0, 1e-12);
  EXPECT_NEAR(s.recall, 0.5, 1e-12);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-12);
}

TEST(CaseF1Test, EdgeCases) {
  EXPECT_EQ(case_f1({words("Seen by Dr McAllister")}, {words("Seen by Dr McAllister")}).f1, 1.0);
  EXPECT_EQ(case_f1({words("no caps here")}, {words("no caps here")}).f1, 1.0);
  EXPECT_EQ(case_f1({words("Mr Smith")}, {words("mr smith")}).f1, 0.0);
  // A partially restored word is a false positive.
  const auto s = case_f1({words("McAllister")}, {words("Mcallister")});
  EXPECT_EQ(s.predicted_positives, 1u);
  EXPECT_EQ(s.true_positives, 0u);
}

TEST(CasePairsTest, LowersEverySentence) {
  const auto pairs = make_case_pairs(make_corpus({"Seen by Dr O'Brien .", "ICU stay ."}));
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].lowered, words("seen by dr o'brien ."));
  EXPECT_EQ(pairs[1].cased, words("ICU stay ."));
}

std::vector<std::string> memorization_sentences() {
  const std::vector<std::string> names = {"McAllister", "Nguyen", "DeVries", "Garcia", "LeBlanc"};
  const std::vector<std::string> places = {"ICU", "CCU", "Mercy General", "the ward", "Boston"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < 50; ++i) {
    out.push_back((i % 2 ? "Seen by Dr " : "Mr ") + names[i % 5] + " at " +
                  places[(i / 5) % 5] + " on day " + std::to_string(i) + " .");
  }
  return out;
}

TEST(TruecaserTest, MemorizesSmallCorpus) {
  const Corpus train = make_corpus(memorization_sentences());
  TruecaserConfig cfg;
  cfg.tagger.epochs = 40;
  const Truecaser caser = train_truecaser(train, cfg);
  EXPECT_GE(evaluate_truecase(caser, make_case_pairs(train)).f1, 0.99);
}

TEST(TruecaserTest, OutputOnlyChangesCase) {
  const Corpus train = make_corpus({"Mr Smith was seen .", "Dr Jones agreed ."});
  TruecaserConfig cfg;
  cfg.tagger.epochs = 2;
  const Truecaser caser = train_truecaser(train, cfg);
  for (const auto& text : {"mr smith went to icu 3 times !", "o'brien , st luke : ok"}) {
    const Sentence in = words(text);
    const Sentence out = caser.restore(in);
    ASSERT_EQ(out.size(), in.size());
    for (std::size_t i = 0; i < in.size(); ++i) EXPECT_EQ(ascii_lower(out[i]), in[i]);
  }
}

TEST(TruecaserTest, DeterministicUnderSeed) {
  const Corpus train = make_corpus(memorization_sentences());
  TruecaserConfig cfg;
  cfg.tagger.epochs = 1;
  cfg.max_sentences = 10;
  const auto a = train_truecaser(train, cfg);
  const auto b = train_truecaser(train, cfg);
  EXPECT_EQ(a.tagger().label_distributions("seen by dr nguyen"),
            b.tagger().label_distributions("seen by dr nguyen"));
}

// Random word vectors and examples labeled by a fixed linear rule on the
// summed premise and hypothesis vectors.
struct SeparableNli {
  EmbeddingSet embeddings;
  std::vector<NliExample> train;
  std::vector<NliExample> test;
};

SeparableNli make_separable_nli() {
  constexpr int kDim = 10;
  constexpr int kWords = 40;
  Rng rng(21);
  std::vector<std::string> vocab;
  Eigen::MatrixXd vectors(kDim, kWords);
  for (int j = 0; j < kWords; ++j) {
    vocab.push_back("w" + std::to_string(j));
    for (int i = 0; i < kDim; ++i) vectors(i, j) = 2.0 * rng.uniform() - 1.0;
  }
  Eigen::MatrixXd rule(3, 2 * kDim);
  for (Eigen::Index i = 0; i < rule.size(); ++i) rule.data()[i] = 2.0 * rng.uniform() - 1.0;
  SeparableNli out{EmbeddingSet(vocab, vectors), {}, {}};
  auto sample = [&](std::size_t n) {
    std::vector<NliExample> examples;
    while (examples.size() < n) {
      NliExample ex;
      Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * kDim);
      for (int k = 0; k < 3; ++k) {
        const auto p = rng.below(kWords);
        const auto h = rng.below(kWords);
        ex.premise.push_back(vocab[p]);
        ex.hypothesis.push_back(vocab[h]);
        x.head(kDim) += vectors.col(static_cast<Eigen::Index>(p));
        x.tail(kDim) += vectors.col(static_cast<Eigen::Index>(h));
      }
      Eigen::Vector3d scores = rule * x;
      Eigen::Index label;
      const double top = scores.maxCoeff(&label);
      scores(label) = -1e300;
      if (top - scores.maxCoeff() < 0.5) continue;  // keep a margin
      ex.label = static_cast<NliLabel>(label);
      examples.push_back(std::move(ex));
    }
    return examples;
  };
  out.train = sample(1500);
  out.test = sample(300);
  return out;
}

std::size_t hash_matrix(const Eigen::MatrixXd& m) {
  return std::hash<std::string_view>{}(std::string_view(
      reinterpret_cast<const char*>(m.data()), sizeof(double) * m.size()));
}

TEST(NliTest, SeparableSetIsLearned) {
  const SeparableNli data = make_separable_nli();
  const std::size_t before = hash_matrix(data.embeddings.vectors());
  NliConfig cfg;
  cfg.epochs = 40;
  const NliClassifier clf = train_nli_bow(data.train, data.embeddings, cfg);
  EXPECT_GE(evaluate_nli(clf, data.test), 0.95);
  EXPECT_EQ(hash_matrix(data.embeddings.vectors()), before);
  const Eigen::Vector3d d = clf.distribution(data.test.front());
  EXPECT_NEAR(d.sum(), 1.0, 1e-12);
  EXPECT_TRUE((d.array() > 0.0).all());
}

TEST(NliTest, FeaturesConcatenateSumsDifferenceAndProduct) {
  const SeparableNli data = make_separable_nli();
  NliConfig cfg;
  cfg.epochs = 1;
  cfg.hidden = 4;
  const NliClassifier clf = train_nli_bow({data.train[0]}, data.embeddings, cfg);
  NliExample ex{{"w1", "w2", "unknown"}, {"w3"}, NliLabel::kNeutral};
  const Eigen::VectorXd sp = data.embeddings.vector("w1") + data.embeddings.vector("w2");
  const Eigen::VectorXd sh = data.embeddings.vector("w3");
  Eigen::VectorXd expected(40);
  expected << sp, sh, sp - sh, sp.cwiseProduct(sh);
  EXPECT_TRUE(clf.features(ex).isApprox(expected, 1e-15));
}

TEST(NliTest, ErrorsAndLabels) {
  const SeparableNli data = make_separable_nli();
  NliConfig cfg;
  cfg.epochs = 1;
  const NliClassifier clf = train_nli_bow(data.train, data.embeddings, cfg);
  EXPECT_THROW(evaluate_nli(clf, {}), ConfigError);
  EXPECT_THROW(parse_nli_label("maybe"), ConfigError);
  for (auto l : {NliLabel::kEntailment, NliLabel::kContradiction, NliLabel::kNeutral}) {
    EXPECT_EQ(parse_nli_label(to_string(l)), l);
  }
}

TEST(NliTest, MajorityBaselineIsAboutOneThird) {
  const SeparableNli data = make_separable_nli();
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& ex : data.test) ++counts[static_cast<int>(ex.label)];
  // Uniform logits always predict the first class.
  NliClassifier constant(&data.embeddings, Eigen::MatrixXd::Zero(2, 40),
                         Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(3, 2),
                         Eigen::VectorXd::Zero(3));
  const double acc = evaluate_nli(constant, data.test);
  EXPECT_NEAR(acc, static_cast<double>(counts[0]) / data.test.size(), 1e-12);
  EXPECT_NEAR(acc, 1.0 / 3.0, 0.15);
}

TEST(NliIoTest, JsonLinesRoundTripAndErrors) {
  const std::vector<NliExample> ex = {
      {{"Patient", "has", "fever", "."}, {"Patient", "is", "febrile", "."},
       NliLabel::kEntailment}};
  std::ostringstream out;
  write_nli(out, ex);
  std::istringstream in(out.str());
  const auto back = read_nli(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].premise, ex[0].premise);
  EXPECT_EQ(back[0].label, NliLabel::kEntailment);
  std::istringstream bad("{\"premise\": \"a\"}\n");
  EXPECT_THROW(read_nli(bad), FormatError);
}

}  // namespace
}  // namespace notesynth
