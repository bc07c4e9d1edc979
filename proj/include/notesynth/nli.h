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

#ifndef NOTESYNTH_NLI_H_
#define NOTESYNTH_NLI_H_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "notesynth/embeddings.h"

namespace notesynth {

enum class NliLabel { kEntailment = 0, kContradiction = 1, kNeutral = 2 };

inline constexpr int kNliClasses = 3;

std::string_view to_string(NliLabel label);
// Throws ConfigError for anything but the three label strings.
NliLabel parse_nli_label(std::string_view name);

struct NliExample {
  std::vector<std::string> premise;
  std::vector<std::string> hypothesis;
  NliLabel label = NliLabel::kNeutral;
};

// JSON lines with string fields "premise", "hypothesis" and "label". Sentences
// are tokenized with the corpus tokenizer.
std::vector<NliExample> read_nli(std::istream& in);
std::vector<NliExample> read_nli_file(const std::string& path);
void write_nli(std::ostream& out, const std::vector<NliExample>& examples);
void write_nli_file(const std::string& path,
                    const std::vector<NliExample>& examples);

struct NliConfig {
  int hidden = 128;
  int epochs = 20;
  double lr = 0.01;
  std::uint64_t seed = 1;
};

// Sum-of-words classifier: [sp; sh; sp - sh; sp * sh] -> tanh -> softmax.
// Words without a vector contribute nothing.
class NliClassifier {
 public:
  NliClassifier(const EmbeddingSet* embeddings, Eigen::MatrixXd w1,
                Eigen::VectorXd b1, Eigen::MatrixXd w2, Eigen::VectorXd b2);

  Eigen::VectorXd features(const NliExample& example) const;
  Eigen::Vector3d distribution(const NliExample& example) const;
  NliLabel predict(const NliExample& example) const;

  const Eigen::MatrixXd& w1() const { return w1_; }
  const Eigen::MatrixXd& w2() const { return w2_; }

 private:
  Eigen::VectorXd sum_vectors(const std::vector<std::string>& words) const;

  const EmbeddingSet* embeddings_;
  Eigen::MatrixXd w1_;
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;
  Eigen::VectorXd b2_;
};

// The embedding set must outlive the classifier and is never modified.
NliClassifier train_nli_bow(const std::vector<NliExample>& train,
                            const EmbeddingSet& embeddings,
                            const NliConfig& config);

// Fraction of correctly labelled examples. Throws ConfigError when empty.
double evaluate_nli(const NliClassifier& classifier,
                    const std::vector<NliExample>& test);

}  // namespace notesynth

#endif  // NOTESYNTH_NLI_H_
