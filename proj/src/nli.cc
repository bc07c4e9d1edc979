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

#include "notesynth/nli.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "json.hpp"

#include "notesynth/common.h"
#include "notesynth/corpus.h"
#include "notesynth/rng.h"
#include "notesynth/tensor.h"

namespace notesynth {
namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment:
      return "entailment";
    case NliLabel::kContradiction:
      return "contradiction";
    case NliLabel::kNeutral:
      return "neutral";
  }
  return "neutral";
}

NliLabel parse_nli_label(std::string_view name) {
  if (name == "entailment") return NliLabel::kEntailment;
  if (name == "contradiction") return NliLabel::kContradiction;
  if (name == "neutral") return NliLabel::kNeutral;
  throw ConfigError("nli: invalid label '" + std::string(name) + "'");
}

std::vector<NliExample> read_nli(std::istream& in) {
  std::vector<NliExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      NliExample ex;
      ex.premise = tokenize(j.at("premise").get<std::string>());
      ex.hypothesis = tokenize(j.at("hypothesis").get<std::string>());
      ex.label = parse_nli_label(j.at("label").get<std::string>());
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("nli line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw FormatError("nli line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<NliExample> read_nli_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_nli(in);
}

void write_nli(std::ostream& out, const std::vector<NliExample>& examples) {
  for (const auto& ex : examples) {
    nlohmann::ordered_json j;
    j["premise"] = join(ex.premise);
    j["hypothesis"] = join(ex.hypothesis);
    j["label"] = std::string(to_string(ex.label));
    out << j.dump() << '\n';
  }
}

void write_nli_file(const std::string& path,
                    const std::vector<NliExample>& examples) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  write_nli(out, examples);
}

NliClassifier::NliClassifier(const EmbeddingSet* embeddings, Eigen::MatrixXd w1,
                             Eigen::VectorXd b1, Eigen::MatrixXd w2,
                             Eigen::VectorXd b2)
    : embeddings_(embeddings),
      w1_(std::move(w1)),
      b1_(std::move(b1)),
      w2_(std::move(w2)),
      b2_(std::move(b2)) {}

Eigen::VectorXd NliClassifier::sum_vectors(
    const std::vector<std::string>& words) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(embeddings_->dim());
  for (const auto& w : words) {
    if (auto idx = embeddings_->find(w)) sum += embeddings_->vectors().col(*idx);
  }
  return sum;
}

Eigen::VectorXd NliClassifier::features(const NliExample& example) const {
  const Eigen::VectorXd p = sum_vectors(example.premise);
  const Eigen::VectorXd h = sum_vectors(example.hypothesis);
  const Eigen::Index d = p.size();
  Eigen::VectorXd f(4 * d);
  f << p, h, p - h, p.cwiseProduct(h);
  return f;
}

Eigen::Vector3d NliClassifier::distribution(const NliExample& example) const {
  const Eigen::VectorXd hidden = (w1_ * features(example) + b1_).array().tanh();
  Eigen::VectorXd logits = w2_ * hidden + b2_;
  return nn::log_softmax_columns(logits).array().exp();
}

NliLabel NliClassifier::predict(const NliExample& example) const {
  Eigen::Index best = 0;
  distribution(example).maxCoeff(&best);
  return static_cast<NliLabel>(best);
}

NliClassifier train_nli_bow(const std::vector<NliExample>& train,
                            const EmbeddingSet& embeddings,
                            const NliConfig& config) {
  if (config.hidden < 1 || config.epochs < 0 || !(config.lr > 0.0)) {
    throw ConfigError("nli: hidden, epochs and lr must be positive");
  }
  if (embeddings.dim() < 1) throw ConfigError("nli: embeddings are empty");
  const Eigen::Index in = 4 * embeddings.dim();
  const Eigen::Index hid = config.hidden;

  Rng rng(derive_seed(config.seed, "nli-init"));
  nn::Matrix<double> w1(hid, in);
  nn::Matrix<double> w2(kNliClasses, hid);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(in));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hid));
  nn::fill_uniform(w1, rng, -s1, s1);
  nn::fill_uniform(w2, rng, -s2, s2);
  NliClassifier model(&embeddings, w1, Eigen::VectorXd::Zero(hid), w2,
                      Eigen::VectorXd::Zero(kNliClasses));

  // Features are fixed because the embeddings are frozen.
  std::vector<Eigen::VectorXd> feats;
  feats.reserve(train.size());
  for (const auto& ex : train) feats.push_back(model.features(ex));
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(hid);
  Eigen::VectorXd b2 = Eigen::VectorXd::Zero(kNliClasses);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng(derive_seed(config.seed, "nli-order"));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, order_rng);
    for (std::size_t i : order) {
      const Eigen::VectorXd hidden = (w1 * feats[i] + b1).array().tanh();
      Eigen::VectorXd logits = w2 * hidden + b2;
      Eigen::VectorXd d_logits = nn::log_softmax_columns(logits).array().exp();
      d_logits(static_cast<int>(train[i].label)) -= 1.0;
      const Eigen::VectorXd d_hidden =
          (w2.transpose() * d_logits).array() * (1.0 - hidden.array().square());
      w2.noalias() -= config.lr * d_logits * hidden.transpose();
      b2 -= config.lr * d_logits;
      w1.noalias() -= config.lr * d_hidden * feats[i].transpose();
      b1 -= config.lr * d_hidden;
    }
  }
  return NliClassifier(&embeddings, std::move(w1), std::move(b1), std::move(w2),
                       std::move(b2));
}

double evaluate_nli(const NliClassifier& classifier,
                    const std::vector<NliExample>& test) {
  if (test.empty()) throw ConfigError("nli: empty test set");
  std::size_t correct = 0;
  for (const auto& ex : test) correct += classifier.predict(ex) == ex.label;
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace notesynth
