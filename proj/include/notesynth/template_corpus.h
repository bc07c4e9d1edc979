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

#ifndef NOTESYNTH_TEMPLATE_CORPUS_H_
#define NOTESYNTH_TEMPLATE_CORPUS_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "notesynth/embeddings.h"
#include "notesynth/nli.h"

namespace notesynth {

// Section headers, each written on its own line followed by ":".
inline constexpr std::array<std::string_view, 5> kTemplateSections = {
    "Admission Details", "Medical History", "Treatment", "Medications",
    "Discharge Details"};

// Seeded stand-in for discharge notes plus the benchmarks that go with it.
struct TemplateCorpus {
  std::string raw;  // raw-input format, notes separated by blank lines
  SimilarityBenchmark similarity;
  SimilarityBenchmark relatedness;
  std::vector<NliExample> nli_train;
  std::vector<NliExample> nli_test;
};

// Throws ConfigError when note_count is 0.
TemplateCorpus make_template_corpus(std::uint64_t seed, std::size_t note_count);

struct TemplatePaths {
  std::string raw;
  std::string similarity;
  std::string relatedness;
  std::string nli_train;
  std::string nli_test;
};

TemplatePaths template_paths(const std::string& dir);
// Writes the five template files into `dir` (created if missing).
TemplatePaths write_template_corpus(const TemplateCorpus& corpus,
                                    const std::string& dir);

}  // namespace notesynth

#endif  // NOTESYNTH_TEMPLATE_CORPUS_H_
