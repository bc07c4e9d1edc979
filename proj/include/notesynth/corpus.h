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

#ifndef NOTESYNTH_CORPUS_H_
#define NOTESYNTH_CORPUS_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "notesynth/common.h"

namespace notesynth {

using Sentence = std::vector<std::string>;

// One clinical note: the privacy record unit.
struct Note {
  std::string id;
  std::vector<Sentence> sentences;

  std::size_t word_count() const;
  // Tokens of all sentences in order.
  std::vector<std::string> tokens() const;

  bool operator==(const Note&) const = default;
};

enum class SplitRole { kTrain, kValid, kTest };

std::string_view to_string(SplitRole role);

struct Corpus {
  std::vector<Note> notes;
  SplitRole role = SplitRole::kTrain;

  std::size_t word_count() const;
  bool empty() const { return notes.empty(); }
};

// Thrown by normalize_raw_note when nothing is left after normalization; the
// caller is expected to skip the note.
class EmptyNoteError : public std::runtime_error {
 public:
  EmptyNoteError() : std::runtime_error("note is empty after normalization") {}
};

// Whitespace split, then leading/trailing characters from .,:;!?()[]"' are
// split off one per token. Inner punctuation stays attached.
std::vector<std::string> tokenize(std::string_view line);

// Merges soft line breaks, tokenizes, and splits sentences at ".", "!", "?".
// A break is merged into a space when the line does not end in . ! ? : and the
// next line starts with an ASCII lowercase letter or a digit.
Note normalize_raw_note(std::string_view raw, std::string id = {});

// Splits a raw file into note texts at blank lines.
std::vector<std::string> split_raw_notes(std::istream& in);

// Reads and normalizes a raw file; empty notes are dropped. Note ids are
// "note-<k>" where k is the position of the note in the raw file.
std::vector<Note> load_raw_notes(std::istream& in);
std::vector<Note> load_raw_notes_file(const std::string& path);

// Canonical corpus format: one sentence per line, tokens separated by single
// spaces, notes separated by exactly one blank line. Note ids are assigned as
// "<prefix><k>" by position.
Corpus read_corpus(std::istream& in, SplitRole role = SplitRole::kTrain,
                   std::string_view id_prefix = "note-");
Corpus read_corpus_file(const std::string& path,
                        SplitRole role = SplitRole::kTrain);
void write_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus_file(const std::string& path, const Corpus& corpus);
std::string corpus_to_string(const Corpus& corpus);

// Token <-> id map. Ids are dense in [0, size()).
class Vocabulary {
 public:
  static constexpr std::string_view kUnk = "<unk>";
  static constexpr std::string_view kEndOfNote = "<eon>";

  Vocabulary() = default;

  // A closed vocabulary over exactly `tokens`, in order. There is no unk entry
  // unless kUnk is one of the tokens. Duplicate tokens are an error.
  static Vocabulary from_tokens(std::vector<std::string> tokens,
                                std::vector<std::uint64_t> counts = {},
                                std::uint64_t min_count = 1);

  std::size_t size() const { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::uint64_t count(TokenId id) const { return counts_.at(id); }
  std::optional<TokenId> unk_id() const { return unk_; }
  std::optional<TokenId> end_of_note_id() const { return eon_; }
  std::uint64_t min_count() const { return min_count_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Maps OOV tokens to unk; throws std::out_of_range when there is no unk.
  TokenId encode(std::string_view token) const;
  std::vector<TokenId> encode(const Note& note) const;

  // Copy with the end-of-note token appended (no-op if already present).
  Vocabulary with_end_of_note() const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && counts_ == other.counts_ &&
           min_count_ == other.min_count_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, TokenId> index_;
  std::optional<TokenId> unk_;
  std::optional<TokenId> eon_;
  std::uint64_t min_count_ = 1;
};

// Entries: unk (id 0), then every token with count >= min_count ordered by
// descending count and then lexicographically.
Vocabulary build_vocabulary(const Corpus& train, std::uint64_t min_count = 3);

Corpus apply_unk(const Corpus& corpus, const Vocabulary& vocab);

struct SplitStats {
  std::size_t notes = 0;
  std::size_t words = 0;
  double oov_rate = 0.0;
};

struct CorpusStats {
  SplitStats train;
  SplitStats valid;
  SplitStats test;
  std::size_t vocab_size = 0;
};

// OOV rate of a split is the fraction of its tokens equal to the unk token.
CorpusStats compute_stats(const Corpus& train, const Corpus& valid,
                          const Corpus& test, const Vocabulary& vocab);

struct CorpusSplit {
  Corpus train;
  Corpus valid;
  Corpus test;
};

// Seeded shuffle, then sizes round(f_train*n), round(f_valid*n), remainder.
// Notes keep their original relative order within each split.
CorpusSplit split_corpus(const std::vector<Note>& notes,
                         const std::array<double, 3>& fractions,
                         std::uint64_t seed);

// ASCII lowercase; other bytes are left alone.
std::string ascii_lower(std::string_view s);

}  // namespace notesynth

#endif  // NOTESYNTH_CORPUS_H_
