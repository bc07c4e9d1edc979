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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"
#include "notesynth/count_models.h"
#include "notesynth/model_io.h"
#include "notesynth/privacy.h"
#include "notesynth/rng.h"
#include "notesynth/template_corpus.h"

namespace notesynth {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string content_hash(std::string_view bytes) {
  return hex64(fnv1a64(bytes));
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not a number: '" + v + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not a non-negative integer: '" +
                      v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const std::uint64_t n = parse_uint(key, v);
  if (n > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw ConfigError("config: " + key + " is too large");
  }
  return static_cast<int>(n);
}

struct Utilities {
  double similarity = 0.0;
  double relatedness = 0.0;
  double nli = 0.0;
  double case_f1 = 0.0;
};

struct Benchmarks {
  SimilarityBenchmark similarity;
  SimilarityBenchmark relatedness;
  std::vector<NliExample> nli_train;
  std::vector<NliExample> nli_test;
  std::vector<CasePair> case_test;
};

class Stage {
 public:
  Stage(std::string name, std::string cell, std::ostream* log)
      : name_(std::move(name)), cell_(std::move(cell)) {
    if (log) *log << "[" << cell_ << "] " << name_ << std::endl;
  }

  template <typename Fn>
  auto run(Fn&& fn) {
    try {
      return fn();
    } catch (const StageError& e) {
      std::string detail = e.what();
      const std::string prefix = e.stage() + ": ";
      if (detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
      throw StageError(e.stage(), "cell " + cell_ + ": " + detail);
    } catch (const std::exception& e) {
      throw StageError(name_, "cell " + cell_ + ": " + e.what());
    }
  }

 private:
  std::string name_;
  std::string cell_;
};

std::string write_artifact(const fs::path& dir, const std::string& stem,
                           const std::string& ext, const std::string& bytes) {
  fs::create_directories(dir);
  const std::string name = stem + "-" + content_hash(bytes) + ext;
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw FormatError("cannot write " + (dir / name).string());
  out << bytes;
  return (dir.filename() / name).string();
}

Utilities evaluate_utilities(const Corpus& corpus, const Benchmarks& bench,
                             const ExperimentConfig& config,
                             const std::string& cell) {
  Utilities u;
  SgnsConfig sgns = config.sgns;
  sgns.seed = derive_seed(config.seed, "sgns/" + cell);
  const EmbeddingSet emb = train_sgns(corpus, sgns);
  const auto counts = word_counts(corpus);
  u.similarity =
      evaluate_similarity(emb, bench.similarity, sgns.min_count, counts).spearman;
  u.relatedness =
      evaluate_similarity(emb, bench.relatedness, sgns.min_count, counts)
          .spearman;

  NliConfig nli = config.nli;
  nli.seed = derive_seed(config.seed, "nli/" + cell);
  const NliClassifier classifier = train_nli_bow(bench.nli_train, emb, nli);
  u.nli = evaluate_nli(classifier, bench.nli_test);

  TruecaserConfig tc = config.truecase;
  tc.tagger.seed = derive_seed(config.seed, "truecase/" + cell);
  const Truecaser caser = train_truecaser(corpus, tc);
  u.case_f1 = evaluate_truecase(caser, bench.case_test).f1;
  return u;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment.seed",         "experiment.output_dir",
      "experiment.jobs",         "data.raw",
      "data.template_notes",     "data.similarity",
      "data.relatedness",        "data.nli_train",
      "data.nli_test",           "data.min_count",
      "data.split",              "grid.models",
      "grid.dropouts",           "lstm.layers",
      "lstm.hidden",             "lstm.epochs",
      "lstm.lr",                 "lstm.lr_policy",
      "lstm.bptt",               "lstm.batch_size",
      "lstm.clip",               "privacy.sample_size",
      "privacy.context_window",  "generate.temperature",
      "generate.max_note_length", "embeddings.dim",
      "embeddings.window",       "embeddings.negatives",
      "embeddings.iterations",   "embeddings.lr",
      "embeddings.min_count",    "nli.hidden",
      "nli.epochs",              "nli.lr",
      "truecase.embedding_dim",  "truecase.hidden",
      "truecase.epochs",         "truecase.lr",
      "truecase.batch_size",     "truecase.max_sentences",
  };
  return keys;
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> read_optional(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string GridCell::name() const {
  if (!dropout) return model;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-d%g", model.c_str(), *dropout);
  return buf;
}

std::vector<GridCell> ExperimentConfig::grid() const {
  std::vector<GridCell> cells;
  for (const auto& m : models) {
    if (m == "lstm") {
      for (double d : dropouts) cells.push_back({m, d});
    } else {
      cells.push_back({m, std::nullopt});
    }
  }
  return cells;
}

void ExperimentConfig::validate() const {
  if (output_dir.empty()) throw ConfigError("config: output_dir is empty");
  if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
  if (models.empty()) throw ConfigError("config: grid.models is empty");
  for (const auto& m : models) {
    if (m != "unigram" && m != "bigram" && m != "lstm") {
      throw ConfigError("config: unknown model '" + m + "'");
    }
  }
  const bool has_lstm =
      std::find(models.begin(), models.end(), "lstm") != models.end();
  if (has_lstm && dropouts.empty()) {
    throw ConfigError("config: grid.dropouts is empty");
  }
  for (double d : dropouts) {
    LstmLmConfig c = lstm;
    c.dropout = d;
    c.validate();
  }
  if (raw_corpus.empty()) {
    if (template_notes < 10) {
      throw ConfigError("config: data.template_notes must be >= 10");
    }
  } else {
    for (const auto& [key, path] :
         {std::pair{"data.raw", &raw_corpus},
          std::pair{"data.similarity", &similarity_path},
          std::pair{"data.relatedness", &relatedness_path},
          std::pair{"data.nli_train", &nli_train_path},
          std::pair{"data.nli_test", &nli_test_path}}) {
      if (path->empty()) {
        throw ConfigError(std::string("config: ") + key +
                          " is required with data.raw");
      }
      if (!fs::exists(*path)) {
        throw ConfigError(std::string("config: ") + key + " does not exist: " +
                          *path);
      }
    }
  }
  if (min_count < 1) throw ConfigError("config: data.min_count must be >= 1");
  double sum = 0.0;
  for (double f : split) {
    if (f < 0.0) throw ConfigError("config: data.split has a negative entry");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("config: data.split must sum to 1");
  }
  if (privacy_sample < 1) {
    throw ConfigError("config: privacy.sample_size must be >= 1");
  }
  if (!(temperature >= 0.0)) {
    throw ConfigError("config: generate.temperature must be >= 0");
  }
  if (max_note_length < 1) {
    throw ConfigError("config: generate.max_note_length must be >= 1");
  }
  if (sgns.dim < 1 || sgns.window < 1 || sgns.negatives < 1 ||
      sgns.iterations < 1 || !(sgns.initial_lr > 0.0)) {
    throw ConfigError("config: invalid embeddings settings");
  }
  truecase.tagger.validate();
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  auto list = [](const auto& xs, auto&& fmt) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ",";
      s += fmt(xs[i]);
    }
    return s;
  };
  auto same = [](const std::string& s) { return s; };
  out << "experiment.seed=" << seed << "\n"
      << "data.raw=" << raw_corpus << "\n"
      << "data.template_notes=" << template_notes << "\n"
      << "data.similarity=" << similarity_path << "\n"
      << "data.relatedness=" << relatedness_path << "\n"
      << "data.nli_train=" << nli_train_path << "\n"
      << "data.nli_test=" << nli_test_path << "\n"
      << "data.min_count=" << min_count << "\n"
      << "data.split=" << list(split, fmt_double) << "\n"
      << "grid.models=" << list(models, same) << "\n"
      << "grid.dropouts=" << list(dropouts, fmt_double) << "\n"
      << "lstm.layers=" << lstm.layers << "\n"
      << "lstm.hidden=" << lstm.hidden_size << "\n"
      << "lstm.epochs=" << lstm.epochs << "\n"
      << "lstm.lr=" << fmt_double(lstm.initial_lr) << "\n"
      << "lstm.lr_policy=" << to_string(lstm.lr_policy) << "\n"
      << "lstm.bptt=" << lstm.bptt << "\n"
      << "lstm.batch_size=" << lstm.batch_size << "\n"
      << "lstm.clip=" << fmt_double(lstm.grad_clip) << "\n"
      << "privacy.sample_size=" << privacy_sample << "\n"
      << "privacy.context_window=" << context_window << "\n"
      << "generate.temperature=" << fmt_double(temperature) << "\n"
      << "generate.max_note_length=" << max_note_length << "\n"
      << "embeddings.dim=" << sgns.dim << "\n"
      << "embeddings.window=" << sgns.window << "\n"
      << "embeddings.negatives=" << sgns.negatives << "\n"
      << "embeddings.iterations=" << sgns.iterations << "\n"
      << "embeddings.lr=" << fmt_double(sgns.initial_lr) << "\n"
      << "embeddings.min_count=" << sgns.min_count << "\n"
      << "nli.hidden=" << nli.hidden << "\n"
      << "nli.epochs=" << nli.epochs << "\n"
      << "nli.lr=" << fmt_double(nli.lr) << "\n"
      << "truecase.embedding_dim=" << truecase.tagger.embedding_dim << "\n"
      << "truecase.hidden=" << truecase.tagger.hidden_size << "\n"
      << "truecase.epochs=" << truecase.tagger.epochs << "\n"
      << "truecase.lr=" << fmt_double(truecase.tagger.lr) << "\n"
      << "truecase.batch_size=" << truecase.tagger.batch_size << "\n"
      << "truecase.max_sentences=" << truecase.max_sentences << "\n";
  return out.str();
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  std::map<std::string, std::string> values;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config: key '" + section + "' is outside a section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known_keys().count(full)) {
        throw ConfigError("config: unknown key '" + full + "'");
      }
      values[full] = trim(value.get_value<std::string>());
    }
  }

  ExperimentConfig c;
  c.lstm.hidden_size = 32;
  c.lstm.epochs = 6;
  c.sgns.dim = 100;
  auto get = [&](const std::string& key, auto&& apply) {
    if (auto it = values.find(key); it != values.end()) apply(key, it->second);
  };
  auto to_uint = [](auto& field) {
    return [&field](const std::string& k, const std::string& v) {
      field = parse_uint(k, v);
    };
  };
  auto to_int = [](int& field) {
    return [&field](const std::string& k, const std::string& v) {
      field = parse_int(k, v);
    };
  };
  auto to_double = [](double& field) {
    return [&field](const std::string& k, const std::string& v) {
      field = parse_double(k, v);
    };
  };
  auto to_string_field = [](std::string& field) {
    return [&field](const std::string&, const std::string& v) { field = v; };
  };

  get("experiment.seed", to_uint(c.seed));
  get("experiment.output_dir", to_string_field(c.output_dir));
  get("experiment.jobs", to_uint(c.jobs));
  get("data.raw", to_string_field(c.raw_corpus));
  get("data.template_notes", to_uint(c.template_notes));
  get("data.similarity", to_string_field(c.similarity_path));
  get("data.relatedness", to_string_field(c.relatedness_path));
  get("data.nli_train", to_string_field(c.nli_train_path));
  get("data.nli_test", to_string_field(c.nli_test_path));
  get("data.min_count", to_uint(c.min_count));
  get("data.split", [&](const std::string& k, const std::string& v) {
    const auto parts = split_list(v);
    if (parts.size() != 3) throw ConfigError("config: " + k + " needs 3 values");
    for (std::size_t i = 0; i < 3; ++i) c.split[i] = parse_double(k, parts[i]);
  });
  get("grid.models", [&](const std::string&, const std::string& v) {
    c.models = split_list(v);
  });
  get("grid.dropouts", [&](const std::string& k, const std::string& v) {
    c.dropouts.clear();
    for (const auto& p : split_list(v)) c.dropouts.push_back(parse_double(k, p));
  });
  get("lstm.layers", to_int(c.lstm.layers));
  get("lstm.hidden", to_int(c.lstm.hidden_size));
  get("lstm.epochs", to_int(c.lstm.epochs));
  get("lstm.lr", to_double(c.lstm.initial_lr));
  get("lstm.lr_policy", [&](const std::string&, const std::string& v) {
    c.lstm.lr_policy = parse_lr_policy(v);
  });
  get("lstm.bptt", to_int(c.lstm.bptt));
  get("lstm.batch_size", to_int(c.lstm.batch_size));
  get("lstm.clip", to_double(c.lstm.grad_clip));
  get("privacy.sample_size", to_uint(c.privacy_sample));
  get("privacy.context_window", to_uint(c.context_window));
  get("generate.temperature", to_double(c.temperature));
  get("generate.max_note_length", to_uint(c.max_note_length));
  get("embeddings.dim", to_int(c.sgns.dim));
  get("embeddings.window", to_int(c.sgns.window));
  get("embeddings.negatives", to_int(c.sgns.negatives));
  get("embeddings.iterations", to_int(c.sgns.iterations));
  get("embeddings.lr", to_double(c.sgns.initial_lr));
  get("embeddings.min_count", to_uint(c.sgns.min_count));
  get("nli.hidden", to_int(c.nli.hidden));
  get("nli.epochs", to_int(c.nli.epochs));
  get("nli.lr", to_double(c.nli.lr));
  get("truecase.embedding_dim", to_int(c.truecase.tagger.embedding_dim));
  get("truecase.hidden", to_int(c.truecase.tagger.hidden_size));
  get("truecase.epochs", to_int(c.truecase.tagger.epochs));
  get("truecase.lr", to_double(c.truecase.tagger.lr));
  get("truecase.batch_size", to_int(c.truecase.tagger.batch_size));
  get("truecase.max_sentences", to_uint(c.truecase.max_sentences));

  if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
    c.output_dir = env;
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  ExperimentConfig c = parse_experiment_config(in);
  // Relative data paths are resolved against the config file's directory.
  const fs::path base = fs::path(path).parent_path();
  for (std::string* p : {&c.raw_corpus, &c.similarity_path, &c.relatedness_path,
                         &c.nli_train_path, &c.nli_test_path}) {
    if (!p->empty() && fs::path(*p).is_relative()) *p = (base / *p).string();
  }
  return c;
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::ostream* log) {
  config.validate();
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);

  ExperimentReport report;
  report.config_hash = content_hash(config.canonical());

  // Data.
  std::vector<Note> notes;
  Benchmarks bench;
  Stage("preprocess", "data", log).run([&] {
    std::string raw_path = config.raw_corpus;
    std::string sim = config.similarity_path;
    std::string rel = config.relatedness_path;
    std::string nli_train = config.nli_train_path;
    std::string nli_test = config.nli_test_path;
    if (raw_path.empty()) {
      const TemplatePaths paths = write_template_corpus(
          make_template_corpus(derive_seed(config.seed, "template"),
                               config.template_notes),
          (out_dir / "data").string());
      raw_path = paths.raw;
      if (sim.empty()) sim = paths.similarity;
      if (rel.empty()) rel = paths.relatedness;
      if (nli_train.empty()) nli_train = paths.nli_train;
      if (nli_test.empty()) nli_test = paths.nli_test;
    }
    notes = load_raw_notes_file(raw_path);
    bench.similarity = read_benchmark_file(sim);
    bench.relatedness = read_benchmark_file(rel);
    bench.nli_train = read_nli_file(nli_train);
    bench.nli_test = read_nli_file(nli_test);
    return 0;
  });

  const CorpusSplit split =
      split_corpus(notes, config.split, derive_seed(config.seed, "split"));
  if (split.train.notes.size() < 2 || split.valid.empty() ||
      split.test.empty()) {
    throw StageError("preprocess", "corpus too small for the configured split");
  }
  const Vocabulary vocab =
      build_vocabulary(split.train, config.min_count).with_end_of_note();
  const Corpus train = apply_unk(split.train, vocab);
  const Corpus valid = apply_unk(split.valid, vocab);
  bench.case_test = make_case_pairs(split.test);
  report.train_notes = train.notes.size();
  report.train_words = train.word_count();
  report.vocab_size = vocab.size();
  const std::string real_name =
      write_artifact(out_dir / "corpora", "real-train", ".txt",
                     corpus_to_string(train));

  for (const GridCell& cell : config.grid()) {
    const std::string name = cell.name();
    ReportRow row;
    row.model = cell.model;
    row.dropout = cell.dropout;

    LmTrainer trainer;
    std::string description;
    if (cell.model == "unigram") {
      trainer = [&vocab](const Corpus& c) -> ModelPtr {
        return std::make_shared<UnigramModel>(UnigramModel::train(c, vocab));
      };
      description = "unigram";
    } else if (cell.model == "bigram") {
      trainer = [&vocab](const Corpus& c) -> ModelPtr {
        return std::make_shared<BigramModel>(BigramModel::train(c, vocab));
      };
      description = "bigram";
    } else {
      LstmLmConfig lc = config.lstm;
      lc.dropout = *cell.dropout;
      lc.seed = derive_seed(config.seed, "lstm");
      trainer = [&vocab, &valid, lc](const Corpus& c) -> ModelPtr {
        return std::make_shared<LstmModel>(
            train_lstm_lm<double>(c, valid, vocab, lc));
      };
      description = "lstm layers=" + std::to_string(lc.layers) +
                    " hidden=" + std::to_string(lc.hidden_size) +
                    " dropout=" + fmt_double(lc.dropout) +
                    " epochs=" + std::to_string(lc.epochs) +
                    " seed=" + std::to_string(lc.seed);
    }

    const ModelPtr model =
        Stage("train", name, log).run([&] { return trainer(train); });
    row.artifacts.push_back(write_artifact(out_dir / "models", name, ".ptlm",
                                           model_to_bytes(*model)));
    row.perplexity =
        Stage("perplexity", name, log).run([&] { return perplexity(*model, valid); });

    const PrivacyReport privacy = Stage("privacy", name, log).run([&] {
      PrivacyConfig pc;
      pc.sample_size = config.privacy_sample;
      pc.seed = derive_seed(config.seed, "privacy");
      pc.trainer = trainer;
      pc.trainer_description = description;
      pc.jobs = config.jobs;
      pc.context_window = config.context_window;
      return s_pdtp_score(train, pc);
    });
    row.privacy = privacy.aggregate;
    row.artifacts.push_back(write_artifact(out_dir / "privacy", name, ".json",
                                           privacy_report_to_json(privacy)));

    const Corpus synthetic = Stage("generate", name, log).run([&] {
      GenerationConfig gc;
      gc.target_word_count = train.word_count();
      gc.temperature = config.temperature;
      gc.seed = derive_seed(config.seed, "generate/" + name);
      gc.max_note_length = config.max_note_length;
      return generate_corpus(*model, gc);
    });
    row.utility_corpus = write_artifact(out_dir / "corpora", "synthetic-" + name,
                                        ".txt", corpus_to_string(synthetic));
    row.artifacts.push_back(row.utility_corpus);

    const Utilities u = Stage("utility", name, log).run(
        [&] { return evaluate_utilities(synthetic, bench, config, name); });
    row.similarity = u.similarity;
    row.relatedness = u.relatedness;
    row.nli = u.nli;
    row.case_f1 = u.case_f1;
    report.rows.push_back(std::move(row));
  }

  ReportRow real;
  real.model = "real";
  real.utility_corpus = real_name;
  real.artifacts.push_back(real_name);
  const Utilities u = Stage("utility", "real", log).run(
      [&] { return evaluate_utilities(train, bench, config, "real"); });
  real.similarity = u.similarity;
  real.relatedness = u.relatedness;
  real.nli = u.nli;
  real.case_f1 = u.case_f1;
  report.rows.push_back(std::move(real));

  {
    std::ofstream json(out_dir / "report.json", std::ios::binary);
    json << report_to_json(report);
    std::ofstream table(out_dir / "report.txt", std::ios::binary);
    table << render_report_table(report);
    if (!json || !table) {
      throw StageError("report", "cannot write into " + out_dir.string());
    }
  }
  return report;
}

std::string report_to_json(const ExperimentReport& report) {
  Json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = report.config_hash;
  j["train_notes"] = report.train_notes;
  j["train_words"] = report.train_words;
  j["vocab_size"] = report.vocab_size;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row;
    row["model"] = r.model;
    row["dropout"] = optional_number(r.dropout);
    row["perplexity"] = optional_number(r.perplexity);
    row["privacy"] = optional_number(r.privacy);
    row["similarity"] = r.similarity;
    row["relatedness"] = r.relatedness;
    row["nli"] = r.nli;
    row["case"] = r.case_f1;
    row["utility_corpus"] = r.utility_corpus;
    row["artifacts"] = r.artifacts;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    ExperimentReport report;
    report.config_hash = j.at("config_hash").get<std::string>();
    report.train_notes = j.at("train_notes").get<std::size_t>();
    report.train_words = j.at("train_words").get<std::size_t>();
    report.vocab_size = j.at("vocab_size").get<std::size_t>();
    for (const auto& r : j.at("rows")) {
      ReportRow row;
      row.model = r.at("model").get<std::string>();
      row.dropout = read_optional(r.at("dropout"));
      row.perplexity = read_optional(r.at("perplexity"));
      row.privacy = read_optional(r.at("privacy"));
      row.similarity = r.at("similarity").get<double>();
      row.relatedness = r.at("relatedness").get<double>();
      row.nli = r.at("nli").get<double>();
      row.case_f1 = r.at("case").get<double>();
      row.utility_corpus = r.at("utility_corpus").get<std::string>();
      row.artifacts = r.at("artifacts").get<std::vector<std::string>>();
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

std::string render_report_table(const ExperimentReport& report) {
  const std::vector<std::string> header = {"model",      "dropout", "perplexity",
                                           "privacy",    "similarity",
                                           "relatedness", "nli",     "case"};
  std::vector<std::vector<std::string>> cells;
  auto num = [](double v, const char* f) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), f, v);
    return std::string(buf);
  };
  auto opt = [&](const std::optional<double>& v, const char* f) {
    return v ? num(*v, f) : std::string("-");
  };
  for (const auto& r : report.rows) {
    cells.push_back({r.model, opt(r.dropout, "%.1f"), opt(r.perplexity, "%.1f"),
                     opt(r.privacy, "%.2f"), num(r.similarity, "%.3f"),
                     num(r.relatedness, "%.3f"), num(r.nli, "%.3f"),
                     num(r.case_f1, "%.3f")});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      if (c == 0) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    out << "\n";
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << "\n";
  for (const auto& row : cells) emit(row);
  return out.str();
}

}  // namespace notesynth
