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

#ifndef NOTESYNTH_EMBEDDINGS_H_
#define NOTESYNTH_EMBEDDINGS_H_

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "notesynth/corpus.h"

namespace notesynth {

// Skip-gram with negative sampling. Defaults not listed here follow the
// usual word2vec settings: unigram^0.75 noise distribution, no frequent-word
// subsampling, learning rate decayed linearly to 1e-4 of its initial value,
// context window shrunk uniformly at random per center word.
struct SgnsConfig {
  int dim = 300;
  int window = 5;
  int negatives = 10;
  int iterations = 10;
  double initial_lr = 0.025;
  std::uint64_t min_count = 5;
  double noise_power = 0.75;
  std::uint64_t seed = 1;
};

class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::vector<std::string> words, Eigen::MatrixXd vectors,
               SgnsConfig config = {});

  int dim() const { return static_cast<int>(vectors_.rows()); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }  // dim x n
  const SgnsConfig& config() const { return config_; }

  std::optional<Eigen::Index> find(std::string_view word) const;
  Eigen::VectorXd vector(std::string_view word) const;  // throws if absent

 private:
  std::vector<std::string> words_;
  Eigen::MatrixXd vectors_;
  std::unordered_map<std::string, Eigen::Index> index_;
  SgnsConfig config_;
};

std::unordered_map<std::string, std::uint64_t> word_counts(const Corpus& corpus);

// (center, context) position pairs within `window` positions of each other.
std::vector<std::pair<std::size_t, std::size_t>> context_pairs(
    std::size_t sentence_length, int window);

// Loss -log s(u_0.v) - sum_{k>0} log s(-u_k.v) for center vector v and output
// vectors U = [u_0 (positive), u_1..u_K (negatives)], with its gradients.
double sgns_loss_gradient(const Eigen::Ref<const Eigen::VectorXd>& center,
                          const Eigen::Ref<const Eigen::MatrixXd>& outputs,
                          Eigen::VectorXd& d_center, Eigen::MatrixXd& d_outputs);

// Single-threaded and deterministic given the seed.
EmbeddingSet train_sgns(const Corpus& corpus, const SgnsConfig& config);

// Throws ConfigError for zero vectors.
double cosine(const Eigen::Ref<const Eigen::VectorXd>& a,
              const Eigen::Ref<const Eigen::VectorXd>& b);

struct SimilarityPair {
  std::string word1;
  std::string word2;
  double gold = 0.0;
};

struct SimilarityBenchmark {
  std::string name;
  std::vector<SimilarityPair> pairs;
};

// CSV with header "word1,word2,score". Duplicate unordered pairs are rejected.
SimilarityBenchmark read_benchmark(std::istream& in, std::string name);
SimilarityBenchmark read_benchmark_file(const std::string& path);
void write_benchmark(std::ostream& out, const SimilarityBenchmark& bench);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of the average ranks; 0 when either side is constant.
double spearman(std::span<const double> a, std::span<const double> b);

struct SimilarityResult {
  double spearman = 0.0;
  std::size_t pairs_used = 0;
};

// Pairs where either word occurs fewer than `min_count` times in `counts`
// (the embeddings' training corpus), or has no vector, are skipped.
SimilarityResult evaluate_similarity(
    const EmbeddingSet& embeddings, const SimilarityBenchmark& bench,
    std::uint64_t min_count,
    const std::unordered_map<std::string, std::uint64_t>& counts);

// Text format: "<count> <dim>" then one "word v1 ... vdim" line per word.
void write_embeddings(std::ostream& out, const EmbeddingSet& embeddings);
EmbeddingSet read_embeddings(std::istream& in);

}  // namespace notesynth

#endif  // NOTESYNTH_EMBEDDINGS_H_
