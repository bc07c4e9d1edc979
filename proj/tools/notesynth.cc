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

// Command-line driver. Exit codes: 0 success, 1 configuration error,
// 2 stage failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "notesynth/corpus.h"
#include "notesynth/count_models.h"
#include "notesynth/embeddings.h"
#include "notesynth/experiment.h"
#include "notesynth/generate.h"
#include "notesynth/lstm_lm.h"
#include "notesynth/model_io.h"
#include "notesynth/nli.h"
#include "notesynth/privacy.h"
#include "notesynth/template_corpus.h"
#include "notesynth/truecase.h"

namespace ns = notesynth;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitStage = 2;

struct LmOptions {
  std::string kind = "unigram";
  ns::LstmLmConfig lstm;
  std::string lr_policy = "medtext2";

  void add(CLI::App* app) {
    app->add_option("--model", kind, "unigram, bigram or lstm")
        ->check(CLI::IsMember({"unigram", "bigram", "lstm"}));
    app->add_option("--layers", lstm.layers);
    app->add_option("--hidden", lstm.hidden_size);
    app->add_option("--dropout", lstm.dropout);
    app->add_option("--lr", lstm.initial_lr);
    app->add_option("--lr-policy", lr_policy, "medtext2 or medtext103");
    app->add_option("--epochs", lstm.epochs);
    app->add_option("--clip", lstm.grad_clip);
    app->add_option("--bptt", lstm.bptt);
    app->add_option("--batch-size", lstm.batch_size);
    app->add_option("--lm-seed", lstm.seed);
  }

  ns::LmTrainer trainer(const ns::Vocabulary& vocab, const ns::Corpus& valid) {
    lstm.lr_policy = ns::parse_lr_policy(lr_policy);
    if (kind == "unigram") {
      return [vocab](const ns::Corpus& c) -> ns::ModelPtr {
        return std::make_shared<ns::UnigramModel>(ns::UnigramModel::train(c, vocab));
      };
    }
    if (kind == "bigram") {
      return [vocab](const ns::Corpus& c) -> ns::ModelPtr {
        return std::make_shared<ns::BigramModel>(ns::BigramModel::train(c, vocab));
      };
    }
    lstm.validate();
    return [vocab, valid, cfg = lstm](const ns::Corpus& c) -> ns::ModelPtr {
      return std::make_shared<ns::LstmModel>(
          ns::train_lstm_lm<double>(c, valid, vocab, cfg));
    };
  }
};

struct SgnsOptions {
  ns::SgnsConfig config;

  void add(CLI::App* app) {
    config.dim = 100;
    app->add_option("--dim", config.dim);
    app->add_option("--window", config.window);
    app->add_option("--negatives", config.negatives);
    app->add_option("--iterations", config.iterations);
    app->add_option("--emb-lr", config.initial_lr);
    app->add_option("--emb-min-count", config.min_count);
    app->add_option("--emb-seed", config.seed);
  }
};

ns::EmbeddingSet load_or_train_embeddings(const std::string& embeddings_path,
                                          const ns::Corpus& corpus,
                                          const ns::SgnsConfig& config) {
  if (!embeddings_path.empty()) {
    std::ifstream in(embeddings_path);
    if (!in) throw ns::ConfigError("cannot open " + embeddings_path);
    return ns::read_embeddings(in);
  }
  return ns::train_sgns(corpus, config);
}

// Vocabulary of a training corpus for the LM pipeline.
ns::Vocabulary pipeline_vocabulary(const ns::Corpus& train,
                                   std::uint64_t min_count) {
  return ns::build_vocabulary(train, min_count).with_end_of_note();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ns::FormatError("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ns::ConfigError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void print_analysis(const ns::PrivacyAnalysis& a) {
  std::cout << "\nsigns: " << a.positive << " positive, " << a.negative
            << " negative, " << a.ties << " tie\nranked:\n";
  for (const auto& r : a.ranked) {
    std::cout << "  " << r.s_pdtp << "  " << r.note_id << "  " << r.token << "  ("
              << ns::to_string(r.sign) << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language-model synthetic note toolkit"};
  app.set_version_flag("--version", std::string(ns::kToolVersion));
  app.require_subcommand(1);

  // preprocess
  std::string raw_in, out_dir;
  std::uint64_t min_count = 3, seed = 1;
  std::vector<double> fractions = {0.8, 0.1, 0.1};
  auto* pre = app.add_subcommand("preprocess",
                                 "Normalize a raw file and split it");
  pre->add_option("--input", raw_in)->required();
  pre->add_option("--out-dir", out_dir)->required();
  pre->add_option("--min-count", min_count);
  pre->add_option("--split", fractions)->expected(3)->delimiter(',');
  pre->add_option("--seed", seed);

  // stats
  std::string train_path, valid_path, test_path;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--train", train_path)->required();
  stats->add_option("--valid", valid_path)->required();
  stats->add_option("--test", test_path)->required();
  stats->add_option("--min-count", min_count);

  // train-lm
  std::string model_out;
  LmOptions lm;
  auto* train_lm = app.add_subcommand("train-lm", "Train a language model");
  train_lm->add_option("--train", train_path)->required();
  train_lm->add_option("--valid", valid_path);
  train_lm->add_option("--out", model_out)->required();
  train_lm->add_option("--min-count", min_count);
  lm.add(train_lm);

  // perplexity
  std::string model_path, corpus_path;
  auto* ppl = app.add_subcommand("perplexity", "Perplexity of a model");
  ppl->add_option("--model", model_path)->required();
  ppl->add_option("--corpus", corpus_path)->required();

  // generate
  ns::GenerationConfig gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Sample a synthetic corpus");
  generate->add_option("--model", model_path)->required();
  generate->add_option("--out", gen_out)->required();
  generate->add_option("--target-words", gen.target_word_count)->required();
  generate->add_option("--temperature", gen.temperature);
  generate->add_option("--seed", gen.seed);
  generate->add_option("--max-note-len", gen.max_note_length);

  // privacy
  std::size_t sample_size = 30, jobs = 1, context_window = 5;
  std::string report_out;
  LmOptions priv_lm;
  auto* privacy = app.add_subcommand("privacy", "Leave-one-out S-PDTP score");
  privacy->add_option("--train", train_path)->required();
  privacy->add_option("--valid", valid_path);
  privacy->add_option("--min-count", min_count);
  privacy->add_option("--sample-size", sample_size);
  privacy->add_option("--seed", seed);
  privacy->add_option("--jobs", jobs);
  privacy->add_option("--context-window", context_window);
  privacy->add_option("--out", report_out);
  priv_lm.add(privacy);

  // eval-sim
  std::string bench_path, embeddings_path, embeddings_out;
  SgnsOptions sgns;
  auto* eval_sim = app.add_subcommand("eval-sim", "Word similarity Spearman");
  eval_sim->add_option("--corpus", corpus_path)->required();
  eval_sim->add_option("--benchmark", bench_path)->required();
  eval_sim->add_option("--embeddings", embeddings_path,
                       "Use these vectors instead of training");
  eval_sim->add_option("--save-embeddings", embeddings_out);
  sgns.add(eval_sim);

  // eval-nli
  std::string nli_train, nli_test;
  ns::NliConfig nli;
  SgnsOptions nli_sgns;
  auto* eval_nli = app.add_subcommand("eval-nli", "Sum-of-words NLI accuracy");
  eval_nli->add_option("--corpus", corpus_path);
  eval_nli->add_option("--embeddings", embeddings_path);
  eval_nli->add_option("--train", nli_train)->required();
  eval_nli->add_option("--test", nli_test)->required();
  eval_nli->add_option("--hidden", nli.hidden);
  eval_nli->add_option("--epochs", nli.epochs);
  eval_nli->add_option("--lr", nli.lr);
  eval_nli->add_option("--seed", nli.seed);
  nli_sgns.add(eval_nli);

  // eval-case
  std::string cased_path, lowered_path;
  ns::TruecaserConfig tc;
  auto* eval_case = app.add_subcommand("eval-case", "Truecasing word-level F1");
  eval_case->add_option("--train", train_path)->required();
  eval_case->add_option("--cased", cased_path)->required();
  eval_case->add_option("--lowered", lowered_path)->required();
  eval_case->add_option("--epochs", tc.tagger.epochs);
  eval_case->add_option("--hidden", tc.tagger.hidden_size);
  eval_case->add_option("--lr", tc.tagger.lr);
  eval_case->add_option("--max-sentences", tc.max_sentences);
  eval_case->add_option("--seed", tc.tagger.seed);

  // template
  std::size_t notes = 1000;
  auto* tmpl = app.add_subcommand("template", "Write the template corpus");
  tmpl->add_option("--seed", seed);
  tmpl->add_option("--notes", notes);
  tmpl->add_option("--out-dir", out_dir)->required();

  // experiment
  std::string config_path;
  std::size_t exp_jobs = 0;
  auto* experiment = app.add_subcommand("experiment", "Run the experiment grid");
  experiment->add_option("--config", config_path)->required();
  experiment->add_option("--jobs", exp_jobs, "Overrides experiment.jobs");
  experiment->add_option("--output-dir", out_dir,
                         "Overrides experiment.output_dir");

  // report
  std::string report_in;
  bool as_json = false;
  auto* report = app.add_subcommand("report", "Render a report file");
  report->add_option("--input", report_in)->required();
  report->add_flag("--json", as_json, "Print normalized JSON instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*pre) {
      if (fractions.size() != 3) throw ns::ConfigError("--split needs 3 values");
      const auto split = ns::split_corpus(ns::load_raw_notes_file(raw_in),
                                          {fractions[0], fractions[1], fractions[2]},
                                          seed);
      fs::create_directories(out_dir);
      ns::write_corpus_file((fs::path(out_dir) / "train.txt").string(), split.train);
      ns::write_corpus_file((fs::path(out_dir) / "valid.txt").string(), split.valid);
      ns::write_corpus_file((fs::path(out_dir) / "test.txt").string(), split.test);
      std::cout << "train " << split.train.notes.size() << " valid "
                << split.valid.notes.size() << " test "
                << split.test.notes.size() << " notes\n";
    } else if (*stats) {
      const auto train = ns::read_corpus_file(train_path);
      const auto vocab = ns::build_vocabulary(train, min_count);
      const auto s = ns::compute_stats(
          ns::apply_unk(train, vocab),
          ns::apply_unk(ns::read_corpus_file(valid_path, ns::SplitRole::kValid), vocab),
          ns::apply_unk(ns::read_corpus_file(test_path, ns::SplitRole::kTest), vocab),
          vocab);
      std::printf("%-6s %8s %10s %8s\n", "split", "notes", "words", "oov");
      for (const auto& [name, st] :
           {std::pair{"train", s.train}, std::pair{"valid", s.valid},
            std::pair{"test", s.test}}) {
        std::printf("%-6s %8zu %10zu %7.2f%%\n", name, st.notes, st.words,
                    100.0 * st.oov_rate);
      }
      std::printf("vocab %zu\n", s.vocab_size);
    } else if (*train_lm) {
      const auto raw_train = ns::read_corpus_file(train_path);
      const auto vocab = pipeline_vocabulary(raw_train, min_count);
      const auto train = ns::apply_unk(raw_train, vocab);
      ns::Corpus valid;
      if (!valid_path.empty()) {
        valid = ns::apply_unk(ns::read_corpus_file(valid_path, ns::SplitRole::kValid),
                              vocab);
      }
      const auto model = lm.trainer(vocab, valid)(train);
      ns::save_model_file(model_out, *model);
      if (!valid.empty()) {
        std::printf("valid perplexity %.4f\n", ns::perplexity(*model, valid));
      }
    } else if (*ppl) {
      const auto model = ns::load_model_file(model_path);
      const auto corpus =
          ns::apply_unk(ns::read_corpus_file(corpus_path), model->vocabulary());
      std::printf("%.6f\n", ns::perplexity(*model, corpus));
    } else if (*generate) {
      const auto model = ns::load_model_file(model_path);
      const auto corpus = ns::generate_corpus(*model, gen);
      ns::write_corpus_file(gen_out, corpus);
      std::cout << corpus.notes.size() << " notes, " << corpus.word_count()
                << " words\n";
    } else if (*privacy) {
      const auto raw_train = ns::read_corpus_file(train_path);
      const auto vocab = pipeline_vocabulary(raw_train, min_count);
      ns::Corpus valid;
      if (!valid_path.empty()) {
        valid = ns::apply_unk(ns::read_corpus_file(valid_path, ns::SplitRole::kValid),
                              vocab);
      }
      ns::PrivacyConfig pc;
      pc.sample_size = sample_size;
      pc.seed = seed;
      pc.jobs = jobs;
      pc.context_window = context_window;
      pc.trainer = priv_lm.trainer(vocab, valid);
      pc.trainer_description = priv_lm.kind;
      const auto result = ns::s_pdtp_score(ns::apply_unk(raw_train, vocab), pc);
      if (!report_out.empty()) {
        write_text(report_out, ns::privacy_report_to_json(result));
      }
      std::cout << ns::render_privacy_table(result);
    } else if (*eval_sim) {
      const auto corpus = ns::read_corpus_file(corpus_path);
      const auto emb = load_or_train_embeddings(embeddings_path, corpus, sgns.config);
      if (!embeddings_out.empty()) {
        std::ofstream out(embeddings_out);
        ns::write_embeddings(out, emb);
      }
      const auto result =
          ns::evaluate_similarity(emb, ns::read_benchmark_file(bench_path),
                                  sgns.config.min_count, ns::word_counts(corpus));
      std::printf("spearman %.6f pairs %zu\n", result.spearman, result.pairs_used);
    } else if (*eval_nli) {
      if (corpus_path.empty() == embeddings_path.empty()) {
        throw ns::ConfigError("eval-nli needs exactly one of --corpus, --embeddings");
      }
      ns::Corpus corpus;
      if (!corpus_path.empty()) corpus = ns::read_corpus_file(corpus_path);
      const auto emb =
          load_or_train_embeddings(embeddings_path, corpus, nli_sgns.config);
      const auto classifier =
          ns::train_nli_bow(ns::read_nli_file(nli_train), emb, nli);
      std::printf("accuracy %.6f\n",
                  ns::evaluate_nli(classifier, ns::read_nli_file(nli_test)));
    } else if (*eval_case) {
      const auto caser =
          ns::train_truecaser(ns::read_corpus_file(train_path), tc);
      const auto score =
          ns::evaluate_truecase(caser, ns::read_case_pairs(cased_path, lowered_path));
      std::printf("precision %.6f recall %.6f f1 %.6f\n", score.precision,
                  score.recall, score.f1);
    } else if (*tmpl) {
      const auto paths =
          ns::write_template_corpus(ns::make_template_corpus(seed, notes), out_dir);
      std::cout << paths.raw << "\n";
    } else if (*experiment) {
      auto config = ns::load_experiment_config(config_path);
      if (exp_jobs) config.jobs = exp_jobs;
      if (!out_dir.empty() && !std::getenv(ns::kOutputDirEnv)) {
        config.output_dir = out_dir;
      }
      const auto result = ns::run_experiment(config, &std::cerr);
      std::cout << ns::render_report_table(result);
    } else if (*report) {
      const std::string text = read_text(report_in);
      if (nlohmann::json::parse(text).contains("records")) {
        const auto parsed = ns::privacy_report_from_json(text);
        if (as_json) {
          std::cout << ns::privacy_report_to_json(parsed);
        } else {
          std::cout << ns::render_privacy_table(parsed);
          print_analysis(ns::analyze_report(parsed));
        }
      } else {
        const auto parsed = ns::report_from_json(text);
        std::cout << (as_json ? ns::report_to_json(parsed)
                              : ns::render_report_table(parsed));
      }
    }
  } catch (const ns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ns::StageError& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
