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

#include "notesynth/experiment.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "experiment_configs.h"
#include "notesynth/corpus.h"
#include "notesynth/template_corpus.h"

namespace notesynth {
namespace {

namespace fs = std::filesystem;
using ::notesynth::testing::kSmallExperimentIni;
using ::notesynth::testing::parse_config_text;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("notesynth-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t word_count_of(const std::string& raw) {
  std::istringstream in(raw);
  Corpus c;
  c.notes = load_raw_notes(in);
  return c.word_count();
}

TEST(TemplateCorpusTest, DeterministicUnderSeed) {
  EXPECT_EQ(make_template_corpus(1, 100).raw, make_template_corpus(1, 100).raw);
  EXPECT_NE(make_template_corpus(1, 100).raw, make_template_corpus(2, 100).raw);
  EXPECT_THROW(make_template_corpus(1, 0), ConfigError);
}

TEST(TemplateCorpusTest, EveryNoteHasAllSectionsInOrder) {
  std::istringstream in(make_template_corpus(1, 100).raw);
  const auto notes = split_raw_notes(in);
  ASSERT_EQ(notes.size(), 100u);
  for (const auto& note : notes) {
    std::size_t from = 0;
    for (const auto& header : kTemplateSections) {
      const auto at = note.find(std::string(header) + ":\n", from);
      ASSERT_NE(at, std::string::npos) << header;
      from = at + header.size();
    }
  }
}

TEST(TemplateCorpusTest, BenchmarkScores) {
  const TemplateCorpus t = make_template_corpus(1, 10);
  std::size_t related = 0;
  for (const auto& p : t.similarity.pairs) {
    EXPECT_TRUE(p.gold == 4.0 || p.gold == 1.0);
    related += p.gold == 4.0;
  }
  EXPECT_EQ(related, 18u);
  EXPECT_EQ(t.similarity.pairs.size(), 36u);
  for (const auto& p : t.relatedness.pairs) EXPECT_TRUE(p.gold == 4.0 || p.gold == 1.0);
  EXPECT_EQ(t.nli_train.size(), 300u);
  EXPECT_EQ(t.nli_test.size(), 150u);
}

TEST(TemplateCorpusTest, WordCountGrowsLinearly) {
  const double per_note = word_count_of(make_template_corpus(1, 100).raw) / 100.0;
  for (std::size_t n : {200, 400, 800}) {
    const double ratio = word_count_of(make_template_corpus(1, n).raw) / (per_note * n);
    EXPECT_NEAR(ratio, 1.0, 0.2) << n;
  }
}

TEST(TemplateCorpusTest, HasMixedCaseProperNouns) {
  const std::string raw = make_template_corpus(1, 50).raw;
  EXPECT_TRUE(std::regex_search(raw, std::regex("Mc[A-Z][a-z]+|De[A-Z][a-z]+")));
}

TEST(ExperimentConfigTest, ParsesKeysAndDefaults) {
  const auto c = parse_config_text(kSmallExperimentIni, "out");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.template_notes, 80u);
  EXPECT_EQ(c.lstm.hidden_size, 8);
  EXPECT_EQ(c.dropouts, (std::vector<double>{0.0, 0.5}));
  ASSERT_EQ(c.grid().size(), 3u);
  EXPECT_EQ(c.grid()[0].name(), "unigram");
  EXPECT_EQ(c.grid()[2].name(), "lstm-d0.5");
  EXPECT_NO_THROW(c.validate());
}

TEST(ExperimentConfigTest, RejectsUnknownKeysAndBadValues) {
  for (const char* text :
       {"[lstm]\nhiden = 3\n", "[grid]\nmodels = trigram\n", "[data]\nsplit = 0.5, 0.5\n",
        "[lstm]\nepochs = -1\n", "[privacy]\nsample_size = lots\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_experiment_config(in).validate(), ConfigError) << text;
  }
}

TEST(ExperimentConfigTest, MissingPathIsAConfigError) {
  std::istringstream in("[data]\nraw = /no/such/notes.txt\n");
  EXPECT_THROW(parse_experiment_config(in).validate(), ConfigError);
}

TEST(ExperimentConfigTest, OutputDirectoryFromEnvironment) {
  ::setenv(kOutputDirEnv, "/tmp/from-env", 1);
  std::istringstream in("[experiment]\noutput_dir = ignored\n");
  const auto c = parse_experiment_config(in);
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(c.output_dir, "/tmp/from-env");
}

TEST(ExperimentConfigTest, HashIgnoresOutputDirAndJobs) {
  auto a = parse_config_text(kSmallExperimentIni, "a");
  auto b = parse_config_text(kSmallExperimentIni, "b");
  b.jobs = 4;
  EXPECT_EQ(a.canonical(), b.canonical());
  b.seed = 4;
  EXPECT_NE(a.canonical(), b.canonical());
}

TEST(ExperimentTest, SmallGridProducesFourRowsAndArtifacts) {
  const fs::path dir = scratch_dir("grid");
  const auto config = parse_config_text(kSmallExperimentIni, dir.string());
  const ExperimentReport report = run_experiment(config);
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[0].model, "unigram");
  EXPECT_EQ(report.rows[1].model, "lstm");
  EXPECT_EQ(report.rows[1].dropout, 0.0);
  EXPECT_EQ(report.rows[2].dropout, 0.5);
  EXPECT_EQ(report.rows[3].model, "real");
  EXPECT_FALSE(report.rows[3].perplexity.has_value());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(report.rows[i].perplexity.has_value());
    EXPECT_GE(*report.rows[i].privacy, 0.0);
    EXPECT_NE(report.rows[i].utility_corpus, report.rows[3].utility_corpus);
    for (const auto& a : report.rows[i].artifacts) EXPECT_TRUE(fs::exists(dir / a)) << a;
  }
  const std::string json = read_file(dir / "report.json");
  EXPECT_EQ(report_to_json(report_from_json(json)), json);
  EXPECT_EQ(report_to_json(report), json);
  EXPECT_FALSE(read_file(dir / "report.txt").empty());

  // A rerun into a fresh directory reproduces the report byte for byte.
  const fs::path again = scratch_dir("grid-again");
  run_experiment(parse_config_text(kSmallExperimentIni, again.string()));
  EXPECT_EQ(read_file(again / "report.json"), json);
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST(ExperimentTest, RenderedTableHasOneLinePerRow) {
  ExperimentReport r;
  r.rows.push_back({"unigram", std::nullopt, 10.5, 0.1, 0.2, 0.0, 0.5, 0.8, "c", {}});
  r.rows.push_back({"real", std::nullopt, std::nullopt, std::nullopt, 0.3, 0.1, 0.6, 0.9, "r", {}});
  // Header and rule line, then the rows.
  const std::string table = render_report_table(r);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 2 + 2);
  EXPECT_NE(table.find("unigram"), std::string::npos);
}

}  // namespace
}  // namespace notesynth
