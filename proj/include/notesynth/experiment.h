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

#ifndef NOTESYNTH_EXPERIMENT_H_
#define NOTESYNTH_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "notesynth/embeddings.h"
#include "notesynth/generate.h"
#include "notesynth/lstm_lm.h"
#include "notesynth/nli.h"
#include "notesynth/truecase.h"

namespace notesynth {

inline constexpr char kOutputDirEnv[] = "NOTESYNTH_OUTPUT_DIR";

struct GridCell {
  std::string model;  // "unigram", "bigram" or "lstm"
  std::optional<double> dropout;

  std::string name() const;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::size_t jobs = 1;

  // Either a raw corpus with its benchmark files, or a generated template
  // corpus of `template_notes` notes.
  std::string raw_corpus;
  std::size_t template_notes = 1000;
  std::string similarity_path;
  std::string relatedness_path;
  std::string nli_train_path;
  std::string nli_test_path;
  std::uint64_t min_count = 3;
  std::array<double, 3> split = {0.8, 0.1, 0.1};

  std::vector<std::string> models = {"unigram", "lstm"};
  std::vector<double> dropouts = {0.0, 0.5};

  LstmLmConfig lstm;
  std::size_t privacy_sample = 30;
  std::size_t context_window = 5;
  double temperature = 1.0;
  std::size_t max_note_length = 2000;
  SgnsConfig sgns;
  NliConfig nli;
  TruecaserConfig truecase;

  std::vector<GridCell> grid() const;
  // Throws ConfigError, including for referenced paths that do not exist.
  void validate() const;
  // Canonical key=value listing; its hash identifies the configuration.
  std::string canonical() const;
};

// INI with sections experiment, data, grid, lstm, privacy, generate,
// embeddings, nli and truecase. Unknown keys are errors. The output directory
// is taken from NOTESYNTH_OUTPUT_DIR when that variable is set.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

struct ReportRow {
  std::string model;  // "real" for the baseline row
  std::optional<double> dropout;
  std::optional<double> perplexity;
  std::optional<double> privacy;
  double similarity = 0.0;
  double relatedness = 0.0;
  double nli = 0.0;
  double case_f1 = 0.0;
  // Artifact names of the corpus each utility model was trained on.
  std::string utility_corpus;
  std::vector<std::string> artifacts;
};

struct ExperimentReport {
  std::string config_hash;
  std::size_t train_notes = 0;
  std::size_t train_words = 0;
  std::size_t vocab_size = 0;
  std::vector<ReportRow> rows;  // grid order, then the real baseline
};

// Runs the whole grid, writing artifacts, report.json and report.txt into the
// output directory. Stage failures are StageError naming the cell.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::ostream* log = nullptr);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
std::string render_report_table(const ExperimentReport& report);

}  // namespace notesynth

#endif  // NOTESYNTH_EXPERIMENT_H_
