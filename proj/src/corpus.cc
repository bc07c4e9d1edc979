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

#include "notesynth/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "notesynth/rng.h"

namespace notesynth {
namespace {

constexpr std::string_view kSplitPunctuation = ".,:;!?()[]\"'";

bool is_split_punct(char c) {
  return kSplitPunctuation.find(c) != std::string_view::npos;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

bool is_sentence_end(std::string_view token) {
  return token == "." || token == "!" || token == "?";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool ends_line_hard(std::string_view line) {
  const char last = line.back();
  return last == '.' || last == '!' || last == '?' || last == ':';
}

bool starts_soft(std::string_view line) {
  const char first = line.front();
  return (first >= 'a' && first <= 'z') || (first >= '0' && first <= '9');
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::size_t Note::word_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<std::string> Note::tokens() const {
  std::vector<std::string> out;
  out.reserve(word_count());
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::string_view to_string(SplitRole role) {
  switch (role) {
    case SplitRole::kTrain:
      return "train";
    case SplitRole::kValid:
      return "valid";
    case SplitRole::kTest:
      return "test";
  }
  return "unknown";
}

std::size_t Corpus::word_count() const {
  std::size_t n = 0;
  for (const auto& note : notes) n += note.word_count();
  return n;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !is_space(line[end])) ++end;
    if (end == pos) break;
    std::string_view chunk = line.substr(pos, end - pos);
    pos = end;

    std::size_t lead = 0;
    while (lead < chunk.size() && is_split_punct(chunk[lead])) ++lead;
    if (lead == chunk.size()) {
      for (char c : chunk) tokens.emplace_back(1, c);
      continue;
    }
    std::size_t tail = chunk.size();
    while (tail > lead && is_split_punct(chunk[tail - 1])) --tail;
    for (std::size_t i = 0; i < lead; ++i) tokens.emplace_back(1, chunk[i]);
    tokens.emplace_back(chunk.substr(lead, tail - lead));
    for (std::size_t i = tail; i < chunk.size(); ++i) {
      tokens.emplace_back(1, chunk[i]);
    }
  }
  return tokens;
}

Note normalize_raw_note(std::string_view raw, std::string id) {
  std::vector<std::string> merged;
  for (const auto& line : split_lines(raw)) {
    std::string_view trimmed = trim(line);
    if (trimmed.empty()) continue;
    if (!merged.empty() && !ends_line_hard(merged.back()) &&
        starts_soft(trimmed)) {
      merged.back().push_back(' ');
      merged.back().append(trimmed);
    } else {
      merged.emplace_back(trimmed);
    }
  }

  Note note;
  note.id = std::move(id);
  for (const auto& line : merged) {
    Sentence current;
    for (auto& token : tokenize(line)) {
      const bool end = is_sentence_end(token);
      current.push_back(std::move(token));
      if (end) {
        note.sentences.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) note.sentences.push_back(std::move(current));
  }
  if (note.sentences.empty()) throw EmptyNoteError();
  return note;
}

std::vector<std::string> split_raw_notes(std::istream& in) {
  std::vector<std::string> notes;
  std::string current;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      if (!current.empty()) notes.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.append(line);
    current.push_back('\n');
  }
  if (!current.empty()) notes.push_back(std::move(current));
  return notes;
}

std::vector<Note> load_raw_notes(std::istream& in) {
  std::vector<Note> notes;
  const auto raw = split_raw_notes(in);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    try {
      notes.push_back(normalize_raw_note(raw[k], "note-" + std::to_string(k)));
    } catch (const EmptyNoteError&) {
      // skipped
    }
  }
  return notes;
}

std::vector<Note> load_raw_notes_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open raw corpus: " + path);
  return load_raw_notes(in);
}

Corpus read_corpus(std::istream& in, SplitRole role,
                   std::string_view id_prefix) {
  Corpus corpus;
  corpus.role = role;
  Note current;
  std::string line;
  std::size_t line_no = 0;
  bool previous_blank = false;
  auto flush = [&] {
    current.id = std::string(id_prefix) + std::to_string(corpus.notes.size());
    corpus.notes.push_back(std::move(current));
    current = Note{};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (previous_blank || current.sentences.empty()) {
        throw FormatError("unexpected blank line at line " +
                          std::to_string(line_no));
      }
      flush();
      previous_blank = true;
      continue;
    }
    previous_blank = false;
    Sentence sentence;
    std::size_t start = 0;
    while (true) {
      const std::size_t end = line.find(' ', start);
      std::string token = line.substr(start, end - start);
      if (token.empty() ||
          std::any_of(token.begin(), token.end(), is_space)) {
        throw FormatError("malformed token at line " + std::to_string(line_no));
      }
      sentence.push_back(std::move(token));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    current.sentences.push_back(std::move(sentence));
  }
  if (!current.sentences.empty()) {
    flush();
  } else if (previous_blank) {
    throw FormatError("trailing blank line");
  }
  return corpus;
}

Corpus read_corpus_file(const std::string& path, SplitRole role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open corpus: " + path);
  return read_corpus(in, role);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  bool first_note = true;
  for (const auto& note : corpus.notes) {
    if (!first_note) out << '\n';
    first_note = false;
    for (const auto& sentence : note.sentences) {
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        if (i) out << ' ';
        out << sentence[i];
      }
      out << '\n';
    }
  }
}

void write_corpus_file(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write corpus: " + path);
  write_corpus(out, corpus);
}

std::string corpus_to_string(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus(out, corpus);
  return out.str();
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::vector<std::uint64_t> counts,
                                   std::uint64_t min_count) {
  if (!counts.empty() && counts.size() != tokens.size()) {
    throw ConfigError("vocabulary counts do not match tokens");
  }
  if (counts.empty()) counts.assign(tokens.size(), 0);
  Vocabulary vocab;
  vocab.min_count_ = min_count;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (!vocab.index_.emplace(tokens[i], id).second) {
      throw ConfigError("duplicate vocabulary entry: " + tokens[i]);
    }
    if (tokens[i] == kUnk) vocab.unk_ = id;
    if (tokens[i] == kEndOfNote) vocab.eon_ = id;
  }
  vocab.tokens_ = std::move(tokens);
  vocab.counts_ = std::move(counts);
  return vocab;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::encode(std::string_view token) const {
  if (auto id = find(token)) return *id;
  if (unk_) return *unk_;
  throw std::out_of_range("token not in closed vocabulary: " +
                          std::string(token));
}

std::vector<TokenId> Vocabulary::encode(const Note& note) const {
  std::vector<TokenId> ids;
  ids.reserve(note.word_count());
  for (const auto& sentence : note.sentences) {
    for (const auto& token : sentence) ids.push_back(encode(token));
  }
  return ids;
}

Vocabulary Vocabulary::with_end_of_note() const {
  if (eon_) return *this;
  auto tokens = tokens_;
  auto counts = counts_;
  tokens.emplace_back(kEndOfNote);
  counts.push_back(0);
  return from_tokens(std::move(tokens), std::move(counts), min_count_);
}

Vocabulary build_vocabulary(const Corpus& train, std::uint64_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be at least 1");
  if (train.empty() || train.word_count() == 0) {
    throw ConfigError("cannot build a vocabulary from an empty corpus");
  }
  std::map<std::string, std::uint64_t> counts;
  for (const auto& note : train.notes) {
    for (const auto& sentence : note.sentences) {
      for (const auto& token : sentence) ++counts[token];
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  std::uint64_t unk_count = 0;
  for (auto& [token, count] : counts) {
    if (token == Vocabulary::kUnk) {
      unk_count += count;
    } else if (count >= min_count) {
      kept.emplace_back(token, count);
    } else {
      unk_count += count;
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<std::string> tokens{std::string(Vocabulary::kUnk)};
  std::vector<std::uint64_t> token_counts{unk_count};
  for (auto& [token, count] : kept) {
    tokens.push_back(std::move(token));
    token_counts.push_back(count);
  }
  return Vocabulary::from_tokens(std::move(tokens), std::move(token_counts),
                                 min_count);
}

Corpus apply_unk(const Corpus& corpus, const Vocabulary& vocab) {
  Corpus out = corpus;
  for (auto& note : out.notes) {
    for (auto& sentence : note.sentences) {
      for (auto& token : sentence) {
        if (!vocab.contains(token)) {
          if (!vocab.unk_id()) {
            throw std::out_of_range("token not in closed vocabulary: " + token);
          }
          token = Vocabulary::kUnk;
        }
      }
    }
  }
  return out;
}

namespace {

SplitStats split_stats(const Corpus& corpus) {
  SplitStats stats;
  stats.notes = corpus.notes.size();
  std::size_t unk = 0;
  for (const auto& note : corpus.notes) {
    for (const auto& sentence : note.sentences) {
      stats.words += sentence.size();
      unk += std::count(sentence.begin(), sentence.end(), Vocabulary::kUnk);
    }
  }
  if (stats.words > 0) {
    stats.oov_rate = static_cast<double>(unk) / static_cast<double>(stats.words);
  }
  return stats;
}

}  // namespace

CorpusStats compute_stats(const Corpus& train, const Corpus& valid,
                          const Corpus& test, const Vocabulary& vocab) {
  if (train.word_count() == 0 || valid.word_count() == 0 ||
      test.word_count() == 0) {
    throw ConfigError("corpus statistics need non-empty train/valid/test");
  }
  CorpusStats stats;
  stats.train = split_stats(train);
  stats.valid = split_stats(valid);
  stats.test = split_stats(test);
  stats.vocab_size = vocab.size();
  return stats;
}

CorpusSplit split_corpus(const std::vector<Note>& notes,
                         const std::array<double, 3>& fractions,
                         std::uint64_t seed) {
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ConfigError("split fractions must be non-negative");
  }
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
  const std::size_t n = notes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);

  const auto n_train = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::llround(fractions[0] * n)));
  const auto n_valid = std::min<std::size_t>(
      n - n_train, static_cast<std::size_t>(std::llround(fractions[1] * n)));

  auto take = [&](std::size_t begin, std::size_t end, SplitRole role) {
    std::vector<std::size_t> idx(order.begin() + begin, order.begin() + end);
    std::sort(idx.begin(), idx.end());
    Corpus c;
    c.role = role;
    for (auto i : idx) c.notes.push_back(notes[i]);
    return c;
  };
  CorpusSplit split;
  split.train = take(0, n_train, SplitRole::kTrain);
  split.valid = take(n_train, n_train + n_valid, SplitRole::kValid);
  split.test = take(n_train + n_valid, n, SplitRole::kTest);
  return split;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace notesynth
