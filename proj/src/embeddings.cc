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

#include "notesynth/embeddings.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "notesynth/rng.h"

namespace notesynth {

EmbeddingSet::EmbeddingSet(std::vector<std::string> words,
                           Eigen::MatrixXd vectors, SgnsConfig config)
    : words_(std::move(words)), vectors_(std::move(vectors)), config_(config) {
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.cols()) {
    throw ConfigError("embedding words and vectors differ in count");
  }
  if (!vectors_.allFinite()) throw ConfigError("non-finite embedding values");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<Eigen::Index>(i)).second) {
      throw ConfigError("duplicate embedding word: " + words_[i]);
    }
  }
}

std::optional<Eigen::Index> EmbeddingSet::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd EmbeddingSet::vector(std::string_view word) const {
  const auto i = find(word);
  if (!i) throw std::out_of_range("no embedding for " + std::string(word));
  return vectors_.col(*i);
}

std::unordered_map<std::string, std::uint64_t> word_counts(const Corpus& corpus) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& note : corpus.notes) {
    for (const auto& sentence : note.sentences) {
      for (const auto& token : sentence) ++counts[token];
    }
  }
  return counts;
}

std::vector<std::pair<std::size_t, std::size_t>> context_pairs(
    std::size_t sentence_length, int window) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const auto w = static_cast<std::size_t>(std::max(window, 0));
  for (std::size_t c = 0; c < sentence_length; ++c) {
    const std::size_t lo = c >= w ? c - w : 0;
    const std::size_t hi = std::min(sentence_length - 1, c + w);
    for (std::size_t o = lo; o <= hi; ++o) {
      if (o != c) pairs.emplace_back(c, o);
    }
  }
  return pairs;
}

namespace {

double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double sgns_loss_gradient(const Eigen::Ref<const Eigen::VectorXd>& center,
                          const Eigen::Ref<const Eigen::MatrixXd>& outputs,
                          Eigen::VectorXd& d_center,
                          Eigen::MatrixXd& d_outputs) {
  const Eigen::VectorXd scores = outputs.transpose() * center;
  // d loss / d score: s(x) - label.
  Eigen::VectorXd d_scores(scores.size());
  double loss = 0.0;
  for (Eigen::Index k = 0; k < scores.size(); ++k) {
    const double label = k == 0 ? 1.0 : 0.0;
    loss -= k == 0 ? log_sigmoid(scores(k)) : log_sigmoid(-scores(k));
    d_scores(k) = sigmoid(scores(k)) - label;
  }
  d_center.noalias() = outputs * d_scores;
  d_outputs.noalias() = center * d_scores.transpose();
  return loss;
}

EmbeddingSet train_sgns(const Corpus& corpus, const SgnsConfig& config) {
  if (config.dim < 1 || config.window < 1 || config.negatives < 0 ||
      config.iterations < 1 || !(config.initial_lr > 0.0)) {
    throw ConfigError("sgns: invalid configuration");
  }
  if (corpus.word_count() == 0) throw ConfigError("sgns: empty corpus");

  const auto counts = word_counts(corpus);
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [word, count] : counts) {
    if (count >= config.min_count) kept.emplace_back(word, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;
  for (const auto& [word, count] : kept) {
    index.emplace(word, static_cast<int>(words.size()));
    words.push_back(word);
  }
  const auto n = static_cast<Eigen::Index>(words.size());
  const int dim = config.dim;
  if (n == 0) return EmbeddingSet({}, Eigen::MatrixXd(dim, 0), config);

  // Noise table in the word2vec style.
  constexpr std::size_t kTableSize = 1'000'000;
  std::vector<int> table(kTableSize);
  {
    double norm = 0.0;
    for (const auto& [word, count] : kept) {
      norm += std::pow(static_cast<double>(count), config.noise_power);
    }
    std::size_t w = 0;
    double cumulative =
        std::pow(static_cast<double>(kept[0].second), config.noise_power) / norm;
    for (std::size_t a = 0; a < kTableSize; ++a) {
      table[a] = static_cast<int>(w);
      if (static_cast<double>(a) / kTableSize > cumulative &&
          w + 1 < kept.size()) {
        ++w;
        cumulative +=
            std::pow(static_cast<double>(kept[w].second), config.noise_power) /
            norm;
      }
    }
  }

  std::vector<std::vector<int>> sentences;
  std::uint64_t train_words = 0;
  for (const auto& note : corpus.notes) {
    for (const auto& sentence : note.sentences) {
      std::vector<int> ids;
      for (const auto& token : sentence) {
        auto it = index.find(token);
        if (it != index.end()) ids.push_back(it->second);
      }
      train_words += ids.size();
      if (!ids.empty()) sentences.push_back(std::move(ids));
    }
  }

  Rng rng(derive_seed(config.seed, "sgns"));
  Eigen::MatrixXd input(dim, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int i = 0; i < dim; ++i) input(i, j) = (rng.uniform() - 0.5) / dim;
  }
  Eigen::MatrixXd output = Eigen::MatrixXd::Zero(dim, n);

  const double total =
      static_cast<double>(config.iterations) * static_cast<double>(train_words) +
      1.0;
  double processed = 0.0;
  std::vector<int> targets;
  Eigen::MatrixXd gathered(dim, config.negatives + 1);
  Eigen::VectorXd d_center(dim);
  Eigen::MatrixXd d_outputs(dim, config.negatives + 1);
  for (int iter = 0; iter < config.iterations; ++iter) {
    for (const auto& ids : sentences) {
      const auto len = static_cast<int>(ids.size());
      for (int c = 0; c < len; ++c) {
        const double lr =
            config.initial_lr * std::max(1e-4, 1.0 - processed / total);
        processed += 1.0;
        const int shrink = static_cast<int>(rng.below(config.window));
        const int reach = config.window - shrink;
        for (int o = std::max(0, c - reach); o <= std::min(len - 1, c + reach);
             ++o) {
          if (o == c) continue;
          targets.assign(1, ids[o]);
          for (int k = 0; k < config.negatives; ++k) {
            const int neg = table[rng.below(kTableSize)];
            if (neg != ids[o]) targets.push_back(neg);
          }
          const auto m = static_cast<Eigen::Index>(targets.size());
          for (Eigen::Index k = 0; k < m; ++k) {
            gathered.col(k) = output.col(targets[k]);
          }
          sgns_loss_gradient(input.col(ids[c]), gathered.leftCols(m), d_center,
                             d_outputs);
          for (Eigen::Index k = 0; k < m; ++k) {
            output.col(targets[k]) -= lr * d_outputs.col(k);
          }
          input.col(ids[c]) -= lr * d_center;
        }
      }
    }
  }
  return EmbeddingSet(std::move(words), std::move(input), config);
}

double cosine(const Eigen::Ref<const Eigen::VectorXd>& a,
              const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw ConfigError("cosine: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw ConfigError("cosine: zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

SimilarityBenchmark read_benchmark(std::istream& in, std::string name) {
  SimilarityBenchmark bench;
  bench.name = std::move(name);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("benchmark: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "word1,word2,score") {
    throw FormatError("benchmark: expected header word1,word2,score");
  }
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    SimilarityPair pair;
    std::string score;
    if (!std::getline(row, pair.word1, ',') ||
        !std::getline(row, pair.word2, ',') || !std::getline(row, score) ||
        pair.word1.empty() || pair.word2.empty()) {
      throw FormatError("benchmark: malformed line " + std::to_string(line_no));
    }
    try {
      std::size_t used = 0;
      pair.gold = std::stod(score, &used);
      if (used != score.size()) throw std::invalid_argument(score);
    } catch (const std::exception&) {
      throw FormatError("benchmark: bad score on line " +
                        std::to_string(line_no));
    }
    auto key = std::minmax(pair.word1, pair.word2);
    if (!seen.emplace(key.first, key.second).second) {
      throw FormatError("benchmark: duplicate pair on line " +
                        std::to_string(line_no));
    }
    bench.pairs.push_back(std::move(pair));
  }
  return bench;
}

SimilarityBenchmark read_benchmark_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open benchmark: " + path);
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  return read_benchmark(in, name);
}

void write_benchmark(std::ostream& out, const SimilarityBenchmark& bench) {
  out << "word1,word2,score\n";
  char score[32];
  for (const auto& p : bench.pairs) {
    std::snprintf(score, sizeof(score), "%.1f", p.gold);
    out << p.word1 << ',' << p.word2 << ',' << score << '\n';
  }
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("spearman: length mismatch");
  if (a.size() < 2) throw ConfigError("spearman: need at least two values");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(ra.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

SimilarityResult evaluate_similarity(
    const EmbeddingSet& embeddings, const SimilarityBenchmark& bench,
    std::uint64_t min_count,
    const std::unordered_map<std::string, std::uint64_t>& counts) {
  auto count_of = [&](const std::string& w) -> std::uint64_t {
    auto it = counts.find(w);
    return it == counts.end() ? 0 : it->second;
  };
  // Sorting the usable pairs makes the result independent of file order.
  std::vector<std::pair<std::pair<std::string, std::string>, double>> usable;
  for (const auto& p : bench.pairs) {
    if (count_of(p.word1) < min_count || count_of(p.word2) < min_count) continue;
    if (!embeddings.find(p.word1) || !embeddings.find(p.word2)) continue;
    usable.push_back({std::minmax(p.word1, p.word2), p.gold});
  }
  if (usable.size() < 3) {
    throw ConfigError("similarity: fewer than 3 usable pairs in " + bench.name);
  }
  std::sort(usable.begin(), usable.end());
  std::vector<double> gold, predicted;
  for (const auto& [words, score] : usable) {
    gold.push_back(score);
    predicted.push_back(cosine(embeddings.vector(words.first),
                               embeddings.vector(words.second)));
  }
  return {spearman(predicted, gold), usable.size()};
}

void write_embeddings(std::ostream& out, const EmbeddingSet& embeddings) {
  out << embeddings.size() << ' ' << embeddings.dim() << '\n';
  char buf[32];
  for (std::size_t j = 0; j < embeddings.size(); ++j) {
    out << embeddings.words()[j];
    for (int i = 0; i < embeddings.dim(); ++i) {
      std::snprintf(buf, sizeof(buf), " %.17g",
                    embeddings.vectors()(i, static_cast<Eigen::Index>(j)));
      out << buf;
    }
    out << '\n';
  }
}

EmbeddingSet read_embeddings(std::istream& in) {
  std::size_t count = 0;
  int dim = 0;
  if (!(in >> count >> dim) || dim < 1) {
    throw FormatError("embeddings: bad header");
  }
  std::vector<std::string> words(count);
  Eigen::MatrixXd vectors(dim, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    if (!(in >> words[j])) throw FormatError("embeddings: truncated");
    for (int i = 0; i < dim; ++i) {
      if (!(in >> vectors(i, static_cast<Eigen::Index>(j)))) {
        throw FormatError("embeddings: truncated vector for " + words[j]);
      }
    }
  }
  return EmbeddingSet(std::move(words), std::move(vectors));
}

}  // namespace notesynth
